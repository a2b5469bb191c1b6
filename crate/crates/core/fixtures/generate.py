#!/usr/bin/env python3
"""Regenerates the bundled PGM fixtures. Output is deterministic."""
import os, math
OUT = os.path.dirname(os.path.abspath(__file__))
V = 200
G = {
"O": """
..######..
.########.
##......##
##......##
##......##
##......##
##......##
##......##
.########.
..######..
""",
"C": """
..#######
.########
##.......
##.......
##.......
##.......
##.......
##.......
.########
..#######
""",
"E": """
#########
#########
##.......
##.......
#########
#########
##.......
##.......
#########
#########
""",
"H": """
##.....##
##.....##
##.....##
##.....##
#########
#########
##.....##
##.....##
##.....##
##.....##
""",
"U": """
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
##.....##
.#######.
..#####..
""",
"A": """
....###....
...#####...
...##.##...
..##...##..
..##...##..
.#########.
.#########.
##.......##
##.......##
##.......##
""",
}
def rows(art):
    return [r for r in art.strip("\n").split("\n")]
def write(name, grid, maxval=255, comment=None):
    h = len(grid); w = len(grid[0])
    with open(os.path.join(OUT, name), "w") as f:
        f.write("P2\n")
        if comment: f.write(f"# {comment}\n")
        f.write(f"{w} {h}\n{maxval}\n")
        for row in grid:
            f.write(" ".join(str(v) for v in row) + "\n")
def from_art(art, v=V, pad=1):
    rs = rows(art); w = max(len(r) for r in rs)
    g = [[v if (c < len(r) and r[c] == "#") else 0 for c in range(w)] for r in rs]
    g = [[0]*w]*pad + g + [[0]*w]*pad
    return [[0]*pad + r + [0]*pad for r in g]
for k, a in G.items():
    write(f"glyph_{k}.pgm", from_art(a), comment=f"glyph {k}")

write("cross.pgm", from_art("""
...##...
...##...
...##...
########
########
...##...
...##...
...##...
""", pad=2), comment="plus sign")
write("x_pair.pgm", [[0,0,0,0],[0,V,0,0],[0,0,V,0],[0,0,0,0]], comment="diagonal pair")
write("square.pgm", [[0,0,0,0],[0,V,V,0],[0,V,V,0],[0,0,0,0]], comment="2x2 square")
write("vbar.pgm", from_art("\n".join(["..##.."]*9), pad=2), comment="vertical stroke")

# sheet of the six glyphs, each at its own gray level
def sheet(keys, levels, gap=3):
    arts = [from_art(G[k], v=lv, pad=0) for k, lv in zip(keys, levels)]
    h = max(len(a) for a in arts) + 4
    out = [[0] for _ in range(h)]
    for a in arts:
        for r in range(h):
            src = a[r-2] if 2 <= r < 2 + len(a) else [0]*len(a[0])
            out[r] += src + [0]*gap
    return out
write("alphabet.pgm", sheet("OCEHUA", [200, 180, 220, 190, 210, 170]), comment="glyph sheet O C E H U A")
write("sheet_OC.pgm", sheet("OC", [200, 200]), comment="two glyphs")

# gray shapes with internal shading, no flat background partition
W, H = 48, 40
img = [[0]*W for _ in range(H)]
def put(r, c, v):
    if 0 <= r < H and 0 <= c < W: img[r][c] = max(img[r][c], v)
for r in range(4, 18):            # ring with a darker lower half
    for c in range(3, 17):
        d = math.hypot(r - 10.5, c - 9.5)
        if 4.2 <= d <= 6.8: put(r, c, 170 if r < 11 else 130)
        if d <= 1.6: put(r, c, 200)
for r in range(4, 18):            # U-like vessel shaded left to right
    for c in range(21, 33):
        if c in (21, 22, 31, 32) or r >= 16: put(r, c, 110 + 4 * (c - 21))
for r in range(22, 36):           # cross with a brighter center
    for c in range(4, 18):
        if 9 <= c <= 12 or 27 <= r <= 30: put(r, c, 220 if (9 <= c <= 12 and 27 <= r <= 30) else 150)
for r in range(22, 36):           # stepped pyramid with a notch
    for c in range(24, 44):
        if abs(c - 33.5) <= (r - 21) * 0.7 and not (r < 30 and 32 <= c <= 35): put(r, c, 90 + 5 * (r - 22))
write("hieroglyph.pgm", img, comment="synthetic gray hieroglyph")

# smooth synthetic face, 64x64
W = H = 64
face = []
for r in range(H):
    row = []
    for c in range(W):
        x, y = (c - 31.5) / 20.0, (r - 33.0) / 26.0
        v = 40 + 30 * math.exp(-((r - 10) ** 2) / 300.0)
        v += 150 * math.exp(-((x * x + y * y) ** 2) * 1.6)
        for ex in (-8.5, 8.5):
            v -= 70 * math.exp(-(((c - 31.5 - ex) ** 2) + ((r - 26) ** 2) * 2.2) / 10.0)
        v += 25 * math.exp(-(((c - 31.5) ** 2) / 6.0 + ((r - 34) ** 2) / 40.0))
        v -= 55 * math.exp(-(((c - 31.5) ** 2) / 60.0 + ((r - 45) ** 2) / 2.5))
        row.append(max(0, min(255, int(round(v)))))
    face.append(row)
write("face.pgm", face, comment="synthetic smooth face")

# bowl falling from the border with a bump that no non-increasing path reaches
W = H = 32
grad = []
for r in range(H):
    row = []
    for c in range(W):
        d = min(r, c, H - 1 - r, W - 1 - c)
        v = 200 - 8 * min(d, 12)
        v += int(round(90 * math.exp(-((r - 20) ** 2 + (c - 12) ** 2) / 8.0)))
        row.append(max(0, min(255, v)))
    grad.append(row)
write("gradient.pgm", grad, comment="bowl with an inner bump")
