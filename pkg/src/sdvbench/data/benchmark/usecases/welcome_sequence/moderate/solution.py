from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class WelcomeApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        await self.Vehicle.Cabin.Door.Row1.DriverSide.IsOpen.subscribe(self.on_door_changed)

    async def on_door_changed(self, data: DataPointReply):
        is_open = data.get(self.Vehicle.Cabin.Door.Row1.DriverSide.IsOpen).value
        if is_open:
            await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(True)
            await self.Vehicle.Cabin.Lights.IsDomeOn.set(True)
        else:
            await asyncio.sleep(5)
            await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(False)
            await self.Vehicle.Cabin.Lights.IsDomeOn.set(False)


async def main():
    vehicle_app = WelcomeApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
