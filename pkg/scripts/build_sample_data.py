"""Regenerate the bundled sample files under src/birdcast/resources/.

    python scripts/build_sample_data.py

Everything here is generated: the pigeon track is simulated and the runway
coordinates are approximate (not for navigation).
"""

import json
from pathlib import Path

from birdcast.data import TrackSeries, write_track_csv
from birdcast.deconflict import RunwayConfig, crossing_bird
from birdcast.synth import simulate_pigeon_track

OUT = Path(__file__).resolve().parents[1] / "src" / "birdcast" / "resources"
EIGHT_AM = 8 * 3600.0

# Cleveland Hopkins 06L/24R-like geometry. Approximate values, non-authoritative.
RUNWAY = {
    "name": "Cleveland Hopkins 06L/24R-like (approximate, not for navigation)",
    "threshold_lat": 41.4030,
    "threshold_lon": -81.8600,
    "heading_deg": 50.0,
    "v_takeoff_mps": 77.0,
    "t_roll_s": 30.0,
    "eps_lat_m": 50.0,
    "eps_lon_m": 50.0,
    "max_delay_s": 10,
}

# Bird crossing the centreline 600 m down the runway at 5 m/s, 15 s after the
# scheduled brake release. Delays of 0-3 s conflict, 4 s clears.
CROSSING = {"along_m": 600.0, "cross_speed": 5.0, "t_cross": 15.0, "duration": 60}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    track = simulate_pigeon_track()
    write_track_csv(TrackSeries(track.t, track.lat, track.lon, track.label, EIGHT_AM), OUT / "pigeon_synthetic_excerpt.csv")

    (OUT / "runway_cle_06l_sample.json").write_text(json.dumps(RUNWAY, indent=2) + "\n", encoding="utf-8")
    spec = RunwayConfig.from_mapping(RUNWAY).runway
    bird = crossing_bird(spec, **CROSSING)
    write_track_csv(TrackSeries(bird.t, bird.lat, bird.lon, "Pigeon (constructed)", EIGHT_AM), OUT / "crossing_bird_forecast.csv")
    far = crossing_bird(spec, along_m=-10000.0, cross_speed=5.0, t_cross=15.0, duration=60)
    write_track_csv(TrackSeries(far.t, far.lat, far.lon, "Pigeon (constructed)", EIGHT_AM), OUT / "clear_bird_forecast.csv")


if __name__ == "__main__":
    main()
