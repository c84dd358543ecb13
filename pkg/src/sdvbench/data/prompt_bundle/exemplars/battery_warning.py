from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class BatteryApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        while True:
            charge = (await self.Vehicle.Powertrain.TractionBattery.StateOfCharge.Current.get()).value
            if charge < 20:
                await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Battery low: " + str(charge))
            await asyncio.sleep(10)


async def main():
    vehicle_app = BatteryApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
