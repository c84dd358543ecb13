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
        violations = 0
        for second in range(60):
            speed = (await self.Vehicle.Speed.get()).value
            if speed > 120:
                violations += 1
            if violations >= 3:
                await self.Vehicle.ADAS.CruiseControl.SpeedSet.set(110)
                await self.Vehicle.ADAS.CruiseControl.IsActive.set(True)
                await self.Vehicle.Body.Horn.IsActive.set(True)
                await asyncio.sleep(1)
                await self.Vehicle.Body.Horn.IsActive.set(False)
                average = (await self.Vehicle.AverageSpeed.get()).value
                await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Average speed: " + str(average))
                break
            await asyncio.sleep(1)


async def main():
    vehicle_app = SpeedApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
