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
        occupied = (await self.Vehicle.Cabin.Seat.Row1.DriverSide.IsOccupied.get()).value
        if not occupied:
            return
        temperature = (await self.Vehicle.Exterior.AirTemperature.get()).value
        if temperature < 0:
            heating = 100
        elif temperature < 10:
            heating = 50
        else:
            heating = 0
        await self.Vehicle.Cabin.Seat.Row1.DriverSide.Heating.set(heating)


async def main():
    vehicle_app = SeatApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
