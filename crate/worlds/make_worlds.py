"""Regenerates the bundled grid worlds. Run from the repository root."""

W, H, RES = 224, 180, 0.25


def office():
    g = [["#"] * W for _ in range(H)]

    def carve(x0, y0, x1, y1):
        for y in range(y0, y1):
            for x in range(x0, x1):
                g[y][x] = "."

    # Corridor lattice, 2 m wide: three horizontal and three vertical runs.
    for c in (8, 86, 164):
        carve(8, c, 216, c + 8)
    for c in (8, 108, 208):
        carve(c, 8, c + 8, 172)

    # Rooms in each block between corridors; one wall cell separates rooms
    # from each other and from the corridors.
    blocks_x = [(16, 108), (116, 208)]
    blocks_y = [(16, 86), (94, 164)]
    for bi, (bx0, bx1) in enumerate(blocks_x):
        for bj, (by0, by1) in enumerate(blocks_y):
            ix0, ix1, iy0, iy1 = bx0 + 1, bx1 - 1, by0 + 1, by1 - 1
            cols = 3
            width = (ix1 - ix0 - (cols - 1)) // cols
            ymid = (iy0 + iy1) // 2
            for c in range(cols):
                rx0 = ix0 + c * (width + 1)
                rx1 = ix1 if c == cols - 1 else rx0 + width
                for r, (ry0, ry1) in enumerate(((iy0, ymid), (ymid + 1, iy1))):
                    carve(rx0, ry0, rx1, ry1)
                    mid = (rx0 + rx1) // 2
                    # door onto the corridor on the room's outer side
                    if r == 0:
                        carve(mid - 2, by0, mid + 2, ry0)
                    else:
                        carve(mid - 2, ry1, mid + 2, by1)
                    # side door to the next room in the row, on alternate rooms
                    if c < cols - 1 and (c + r + bi + bj) % 2 == 0:
                        ymid_room = (ry0 + ry1) // 2
                        carve(rx1, ymid_room - 2, rx1 + 1, ymid_room + 2)
            # a few pillars in the larger rooms
            for c in range(cols):
                px = ix0 + c * (width + 1) + width // 2
                for py in ((iy0 + ymid) // 2, (ymid + 1 + iy1) // 2):
                    for y in range(py - 1, py + 1):
                        for x in range(px - 1, px + 1):
                            g[y][x] = "#"
    return g


def room():
    w, h = 40, 32
    g = [["#"] * w for _ in range(h)]
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            g[y][x] = "."
    return g


def write(path, g, res):
    with open(path, "w") as f:
        f.write(f"{len(g[0])} {len(g)} {res}\n")
        for row in g:
            f.write("".join(row) + "\n")


if __name__ == "__main__":
    write("worlds/office.txt", office(), RES)
    write("worlds/empty_room.txt", room(), RES)
