"""Regenerates the image fixtures in tests/data.

The 16x16 image has four colored quadrants with a small deterministic
perturbation. The expected point CSV is computed here in plain Python so the
C++ image reader is checked against an independent implementation.
"""

from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
SIZE = 16
COLORS = [(230, 40, 40), (40, 200, 60), (50, 60, 220), (240, 220, 30)]


def pixel(x, y):
    quadrant = (1 if x >= SIZE // 2 else 0) + (2 if y >= SIZE // 2 else 0)
    jitter = ((x * 7 + y * 13) % 9) - 4
    return tuple(min(255, max(0, c + jitter)) for c in COLORS[quadrant])


def main():
    pixels = [pixel(x, y) for y in range(SIZE) for x in range(SIZE)]
    header = f"P6\n{SIZE} {SIZE}\n255\n".encode("ascii")
    (DATA / "quadrants16.ppm").write_bytes(header + bytes(v for p in pixels for v in p))

    # ASCII twin of the same raster, with a comment line in the header.
    lines = ["P3", "# four quadrants", f"{SIZE} {SIZE}", "255"]
    lines += [" ".join(str(v) for v in p) for p in pixels]
    (DATA / "quadrants16_ascii.ppm").write_text("\n".join(lines) + "\n")

    rows = ["r,g,b,x,y"]
    for y in range(SIZE):
        for x in range(SIZE):
            r, g, b = pixel(x, y)
            vals = [r / 255, g / 255, b / 255, x / (SIZE - 1), y / (SIZE - 1)]
            rows.append(",".join(repr(v) for v in vals))
    (DATA / "quadrants16_points.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
