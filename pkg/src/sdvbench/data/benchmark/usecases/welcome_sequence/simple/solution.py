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
        is_open = (await self.Vehicle.Cabin.Door.Row1.DriverSide.IsOpen.get()).value
        if is_open:
            await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(True)
            logger.info("Welcome lights on")


async def main():
    vehicle_app = WelcomeApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
