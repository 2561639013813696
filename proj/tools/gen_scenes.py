#!/usr/bin/env python3
"""Writes the three sample scenes to data/scenes.

Layouts are authored by hand below. Identically labeled objects get shuffled 1-based indices
(seeded), so an id says nothing about where the object stands. Rerunning is deterministic.
"""

import argparse
import json
import math
import random
from collections import defaultdict
from pathlib import Path


def box(label, x, y, w, d, h, z=0.0, facing=None, attrs=(), yaw=0.0, tag=None):
    """Object resting at height z with footprint w x d (along x, y before yaw)."""
    obj = {
        "label": label,
        "center": [round(x, 4), round(y, 4), round(z + h / 2, 4)],
        "half_extents": [round(w / 2, 4), round(d / 2, 4), round(h / 2, 4)],
    }
    if yaw:
        obj["yaw"] = yaw
    if facing is not None:
        obj["orientation"] = list(facing)
    if attrs:
        obj["attributes"] = list(attrs)
    if tag:
        obj["_tag"] = tag
    return obj


def chair(x, y, facing, tag=None):
    return box("chair", x, y, 0.45, 0.45, 0.9, facing=facing, attrs=("sittable",), tag=tag)


def seats_around(tx, ty, off):
    return [chair(tx, ty - off, (0, 1)), chair(tx, ty + off, (0, -1)),
            chair(tx - off, ty, (1, 0)), chair(tx + off, ty, (-1, 0))]


def house():
    objs = [
        box("cabinet", 0.35, 5.43, 0.6, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)),
        box("cabinet", 0.95, 5.43, 0.6, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)),
        box("cabinet", 1.55, 5.43, 0.6, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)),
        box("cabinet", 0.3, 3.5, 0.6, 0.6, 0.9, facing=(1, 0), attrs=("interactable",)),
        box("stove", 2.2, 5.43, 0.6, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)),
        box("sink", 2.85, 5.43, 0.6, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)),
        box("refrigerator", 0.4, 4.45, 0.7, 0.7, 1.8, facing=(1, 0), attrs=("interactable",)),
        box("table", 2.0, 2.2, 1.4, 0.8, 0.75, attrs=("interactable",)),
        chair(1.6, 1.45, (0, 1)), chair(2.4, 1.45, (0, 1)),
        chair(1.6, 2.95, (0, -1)), chair(2.4, 2.95, (0, -1)),
        box("cup", 1.8, 2.2, 0.08, 0.08, 0.1, z=0.75, attrs=("interactable",)),
        box("cup", 2.3, 2.1, 0.08, 0.08, 0.1, z=0.75, attrs=("interactable",)),
        box("sofa", 6.5, 0.55, 2.0, 0.9, 0.8, facing=(0, 1), attrs=("sittable", "lieable")),
        box("coffee_table", 6.5, 2.0, 1.1, 0.6, 0.45, attrs=("interactable",)),
        box("tv_stand", 6.5, 5.45, 1.6, 0.45, 0.5, facing=(0, -1)),
        box("tv", 6.5, 5.5, 1.2, 0.1, 0.7, z=0.5, facing=(0, -1), attrs=("interactable",)),
        box("bookshelf", 8.75, 3.3, 0.4, 1.0, 1.9, facing=(-1, 0), attrs=("interactable",)),
        box("lamp", 5.2, 0.35, 0.35, 0.35, 1.5),
        box("lamp", 7.9, 0.35, 0.35, 0.35, 1.5),
        box("plant", 4.2, 5.4, 0.4, 0.4, 1.0),
        box("plant", 8.7, 5.4, 0.4, 0.4, 1.0),
    ]
    actions = ["cook", "eat", "drink", "wash_dishes", "watch_tv", "read", "talk", "clean", "stretch",
               "use_phone", "wait"]
    return "house", [[0, 0], [9, 0], [9, 5.73], [0, 5.73]], objs, actions


def office():
    objs = []
    for row, y in ((0, 2.0), (1, 5.0)):
        for x in (1.5, 3.5, 5.5, 7.5):
            objs.append(box("desk", x, y, 1.4, 0.7, 0.75, facing=(0, -1), attrs=("interactable",)))
            objs.append(box("monitor", x, y + 0.15, 0.6, 0.15, 0.4, z=0.75, facing=(0, -1),
                            attrs=("interactable",)))
            objs.append(chair(x, y - 0.75, (0, 1)))
    objs.append(box("table", 12.0, 7.0, 2.4, 1.0, 0.75, attrs=("interactable",)))
    for x in (11.2, 12.0, 12.8):
        objs.append(chair(x, 6.2, (0, 1)))
        objs.append(chair(x, 7.8, (0, -1)))
    objs.append(box("whiteboard", 12.0, 8.85, 1.8, 0.06, 1.0, z=1.0, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("whiteboard", 0.04, 3.5, 0.06, 1.6, 1.0, z=1.0, facing=(1, 0), attrs=("interactable",)))
    # Waiting area by the reception desk.
    objs.append(box("reception_desk", 16.5, 1.0, 2.0, 0.8, 1.05, facing=(0, 1), attrs=("interactable",)))
    objs.append(chair(17.2, 3.2, (0, -1), tag="waiting"))
    objs.append(chair(15.6, 3.4, (0, -1), tag="waiting"))
    objs.append(chair(14.6, 4.2, (1, -1), tag="waiting"))
    # Lounge with a coffee corner.
    objs.append(box("sofa", 11.0, 0.5, 1.8, 0.8, 0.8, facing=(0, 1), attrs=("sittable", "lieable")))
    objs.append(box("sofa", 11.0, 3.3, 1.8, 0.8, 0.8, facing=(0, -1), attrs=("sittable", "lieable")))
    objs.append(box("table", 11.0, 1.9, 1.0, 0.6, 0.45, attrs=("interactable",)))
    objs.append(box("cabinet", 13.4, 0.35, 0.6, 0.6, 0.9, facing=(0, 1), attrs=("interactable",)))
    objs.append(box("coffee_machine", 13.4, 0.35, 0.3, 0.3, 0.4, z=0.9, facing=(0, 1), attrs=("interactable",)))
    for x in (2.0, 5.0, 8.0):
        objs.append(box("cabinet", x, 8.6, 0.9, 0.5, 1.2, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("cabinet", 9.55, 0.35, 0.6, 0.6, 0.9, facing=(0, 1), attrs=("interactable",)))
    objs.append(box("printer", 9.55, 4.5, 0.6, 0.6, 1.0, facing=(-1, 0), attrs=("interactable",)))
    for x, y in ((0.3, 0.3), (0.3, 8.6), (17.7, 8.6), (9.7, 8.6)):
        objs.append(box("plant", x, y, 0.4, 0.4, 1.0))
    actions = ["work", "type", "drink", "talk", "present", "read", "make_coffee", "print", "wait",
               "use_phone", "rest"]
    return "office", [[0, 0], [18, 0], [18, 8.9], [0, 8.9]], objs, actions


def restaurant():
    objs = []
    tables = [(1.5, 1.5), (4.25, 1.5), (7.0, 1.5), (2.8, 4.3), (5.7, 4.3)]
    for i, (tx, ty) in enumerate(tables):
        objs.append(box("table", tx, ty, 0.9, 0.9, 0.75, attrs=("interactable",)))
        objs.extend(seats_around(tx, ty, 0.7))
        if i < 3:
            objs.append(box("plate", tx + 0.15, ty - 0.1, 0.25, 0.25, 0.03, z=0.75, attrs=("interactable",)))
    objs.append(box("stove", 1.0, 8.2, 0.7, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("sink", 2.0, 8.2, 0.7, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("refrigerator", 0.45, 7.3, 0.7, 0.7, 1.8, facing=(1, 0), attrs=("interactable",)))
    objs.append(box("cabinet", 3.0, 8.2, 0.8, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("cabinet", 4.0, 8.2, 0.8, 0.6, 0.9, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("counter", 5.3, 8.2, 1.2, 0.6, 0.95, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("counter", 6.6, 6.6, 2.5, 0.6, 1.0, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("cash_register", 7.4, 6.6, 0.4, 0.35, 0.25, z=1.0, facing=(0, -1), attrs=("interactable",)))
    objs.append(box("plant", 0.3, 6.2, 0.4, 0.4, 1.0))
    objs.append(box("plant", 8.2, 0.3, 0.4, 0.4, 1.0))
    objs.append(box("lamp", 0.3, 3.0, 0.35, 0.35, 1.5))
    actions = ["eat", "drink", "cook", "serve", "order", "pay", "wash_dishes", "talk", "wait", "clean"]
    return "restaurant", [[0, 0], [8.5, 0], [8.5, 8.5], [0, 8.5]], objs, actions


def assign_ids(objs, rng):
    by_label = defaultdict(list)
    for o in objs:
        by_label[o["label"]].append(o)
    for label, group in by_label.items():
        tagged = [o for o in group if o.get("_tag")]
        rest = [o for o in group if not o.get("_tag")]
        # Tagged objects keep the lowest indices, shuffled among themselves.
        first = list(range(1, len(tagged) + 1))
        later = list(range(len(tagged) + 1, len(group) + 1))
        rng.shuffle(first)
        rng.shuffle(later)
        for o, i in zip(tagged + rest, first + later):
            o["id"] = f"{label}_{i}"
            o.pop("_tag", None)


def check(name, floor, objs):
    w, h = floor[2]
    for o in objs:
        cx, cy, _ = o["center"]
        hx, hy, _ = o["half_extents"]
        assert -1e-9 <= cx - hx and cx + hx <= w + 1e-9, (name, o["id"])
        assert -1e-9 <= cy - hy and cy + hy <= h + 1e-9, (name, o["id"])
    return w * h


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "scenes"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for make in (house, office, restaurant):
        name, floor, objs, actions = make()
        rng = random.Random(f"{args.seed}-{name}")
        assign_ids(objs, rng)
        objs.sort(key=lambda o: (o["label"], int(o["id"].rsplit("_", 1)[1])))
        area = check(name, floor, objs)
        doc = {"name": name, "floor": floor, "actions": actions, "objects": objs}
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        labels = {o["label"] for o in objs}
        print(f"{name}: {len(objs)} objects, {len(labels)} labels, {area:.2f} m^2")


if __name__ == "__main__":
    main()
