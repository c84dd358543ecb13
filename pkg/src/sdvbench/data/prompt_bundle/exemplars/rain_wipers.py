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
        raining = (await self.Vehicle.Exterior.IsRaining.get()).value
        if raining:
            await self.Vehicle.Body.Windshield.Front.Wiping.Mode.set("SLOW")
        else:
            await self.Vehicle.Body.Windshield.Front.Wiping.Mode.set("OFF")


async def main():
    vehicle_app = WiperApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
