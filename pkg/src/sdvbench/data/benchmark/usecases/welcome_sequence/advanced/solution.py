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
            light = (await self.Vehicle.Exterior.LightIntensity.get()).value
            if light < 30:
                await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(True)
                await self.Vehicle.Cabin.Lights.AmbientLight.Intensity.set(80)
            await self.Vehicle.Cabin.Infotainment.HMI.DisplayMessage.set("Welcome back")
            await self.Vehicle.Cabin.Seat.Row1.DriverSide.Position.set(500)
        else:
            intensity = (await self.Vehicle.Cabin.Lights.AmbientLight.Intensity.get()).value
            while intensity > 0:
                intensity = max(0, intensity - 20)
                await self.Vehicle.Cabin.Lights.AmbientLight.Intensity.set(intensity)
                await asyncio.sleep(1)
            await self.Vehicle.Body.Lights.Beam.Low.IsOn.set(False)


async def main():
    vehicle_app = WelcomeApp(vehicle)
    await vehicle_app.run()


LOOP = asyncio.get_event_loop()
LOOP.run_until_complete(main())
LOOP.close()
