from sdv.vdb.reply import DataPointReply
from sdv.vehicle_app import VehicleApp
from vehicle import Vehicle, vehicle
import asyncio
import logging

logger = logging.getLogger(__name__)


class SeatApp(VehicleApp):
    def __init__(self, vehicle_client: Vehicle):
        super().__init__()
        self.Vehicle = vehicle_client

    async def on_start(self):
        await self.Vehicle.Cabin.Seat.Row1.DriverSide.Position.set(200)
        await self.Vehicle.Cabin.Seat.Row1.DriverSide.Height.set(40)
        position = (await self.Vehicle.Cabin.Seat.Row1.DriverSide.Position.get()).value
        logger.info("Seat position: %s", position)


async def main():
    vehicle_app = SeatApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
