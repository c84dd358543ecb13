from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class WiperApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        await self.Vehicle.Exterior.IsRaining.subscribe(self.on_rain_changed)

    async def on_rain_changed(self, data: DataPointReply):
        raining = data.get(self.Vehicle.Exterior.IsRaining).value
        if raining:
            await self.Vehicle.Body.Windshield.Front.Wiping.Mode.set("MEDIUM")
            await self.Vehicle.Cabin.Door.Row1.DriverSide.Window.Position.set(0)
            await self.Vehicle.Cabin.Door.Row1.PassengerSide.Window.Position.set(0)
        else:
            await self.Vehicle.Body.Windshield.Front.Wiping.Mode.set("OFF")


async def main():
    vehicle_app = WiperApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
