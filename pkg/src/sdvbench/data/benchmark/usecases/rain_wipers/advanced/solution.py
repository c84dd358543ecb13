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

    async def choose_mode(self):
        raining = (await self.Vehicle.Exterior.IsRaining.get()).value
        if not raining:
            return "OFF"
        speed = (await self.Vehicle.Speed.get()).value
        humidity = (await self.Vehicle.Exterior.Humidity.get()).value
        if speed > 100 or humidity > 90:
            return "FAST"
        if speed < 50:
            return "SLOW"
        return "MEDIUM"

    async def on_start(self):
        while True:
            mode = await self.choose_mode()
            await self.Vehicle.Body.Windshield.Front.Wiping.Mode.set(mode)
            await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(mode != "OFF")
            await asyncio.sleep(2)


async def main():
    vehicle_app = WiperApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
