from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class SpeedApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        await self.Vehicle.Speed.subscribe(self.on_speed_changed)

    async def on_speed_changed(self, data: DataPointReply):
        speed = data.get(self.Vehicle.Speed).value
        if speed > 100:
            await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Too fast")


async def main():
    vehicle_app = SpeedApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
