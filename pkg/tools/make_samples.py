"""Regenerate the bundled synthetic samples under src/edbsw/samples."""

from pathlib import Path

from PIL import Image

from edbsw import imio, synthetic

ROOT = Path(__file__).resolve().parents[1] / "src" / "edbsw" / "samples"


def main():
    (ROOT / "set").mkdir(parents=True, exist_ok=True)
    (ROOT / "set_gt").mkdir(parents=True, exist_ok=True)
    Image.fromarray(imio.to_uint8(synthetic.square(128))).save(ROOT / "square.pgm")
    scenes = {
        "disk": synthetic.disk(128),
        "square": synthetic.square(128),
        "triangle": synthetic.triangle(128),
    }
    for name, clean in scenes.items():
        noisy = synthetic.add_gaussian_noise(clean, 0.1, seed=0)
        imio.write_png(ROOT / "set" / f"{name}.png", noisy)
        imio.write_png(ROOT / "set_gt" / f"{name}.png", synthetic.edge_mask(clean))


if __name__ == "__main__":
    main()
