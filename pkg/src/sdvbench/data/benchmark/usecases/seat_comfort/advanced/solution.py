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
        recline = (await self.Vehicle.Cabin.Seat.Row1.DriverSide.Backrest.Recline.get()).value
        while recline < 40:
            moving = (await self.Vehicle.IsMoving.get()).value
            if moving:
                await self.Vehicle.Cabin.Seat.Row1.DriverSide.Backrest.Recline.set(10)
                await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Relax mode cancelled")
                return
            recline = min(40, recline + 5)
            await self.Vehicle.Cabin.Seat.Row1.DriverSide.Backrest.Recline.set(recline)
            await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Reclining: " + str(recline))
            await asyncio.sleep(1)
        await self.Vehicle.Cabin.Seat.Row1.DriverSide.Height.set(20)
        await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Relax mode ready")


async def main():
    vehicle_app = SeatApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
