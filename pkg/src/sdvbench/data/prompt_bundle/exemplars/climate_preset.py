from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class ClimateApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        await self.Vehicle.Cabin.HVAC.Station.Row1.Driver.Temperature.set(21)
        cabin = (await self.Vehicle.Cabin.HVAC.AmbientAirTemperature.get()).value
        if cabin > 28:
            await self.Vehicle.Cabin.HVAC.IsAirConditioningActive.set(True)
            fan = 80
            while fan > 0:
                await self.Vehicle.Cabin.HVAC.Station.Row1.Driver.FanSpeed.set(fan)
                await asyncio.sleep(5)
                fan = fan - 20


async def main():
    vehicle_app = ClimateApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
