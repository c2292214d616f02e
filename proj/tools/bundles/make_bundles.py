#!/usr/bin/env python3
"""Regenerates the demo bundles under bundles/.

Each bundle gets manifest.json, PNG rasters under images/, and event scripts. Session
archives (oracle.session.json, demo.session.json) come from `frameplan replay` so they
always agree with the engine; see tools/bundles/refresh.sh.
"""
import itertools
import json
import pathlib
import sys

from PIL import Image, ImageDraw

W, H = 640, 480
FLOOR = (214, 200, 176)


def obj(cls, box, colour, category="food", receptacle=False, shape="ellipse"):
    return {"cls": cls, "box": box, "colour": colour, "category": category,
            "receptacle": receptacle, "shape": shape}


def fixture(cls, box, states, category="appliance"):
    return {"cls": cls, "box": box, "states": states, "category": category}


def draw_fixture(draw, name, spec, state):
    x, y, w, h = spec["box"]
    outline = (90, 70, 50)
    fill = {
        "open": (70, 50, 35), "closed": (160, 120, 80),
        "on": (230, 90, 60), "off": (120, 120, 120),
        "ready": (200, 205, 210),
    }.get(state, (180, 180, 180))
    if spec["cls"] == "faucet":
        fill = (120, 120, 130)
    draw.rectangle([x, y, x + w - 1, y + h - 1], fill=fill, outline=outline, width=3)
    if spec["cls"] == "faucet" and state == "on":
        draw.rectangle([x + w // 2 - 4, y + h, x + w // 2 + 4, y + h + 40], fill=(90, 160, 230))
    if spec["cls"] == "stove" and state == "on":
        draw.ellipse([x + 15, y + 15, x + w - 15, y + h - 15], outline=(255, 40, 20), width=4)


def background(fixtures, combo):
    img = Image.new("RGB", (W, H), FLOOR)
    draw = ImageDraw.Draw(img)
    draw.rectangle([0, 0, W, 30], fill=(235, 228, 215))
    for name, state in combo:
        draw_fixture(draw, name, fixtures[name], state)
    return img


def object_image(spec):
    _, _, w, h = spec["box"]
    img = Image.new("RGBA", (w, h), (0, 0, 0, 0))
    draw = ImageDraw.Draw(img)
    if spec["shape"] == "rect":
        draw.rectangle([0, 0, w - 1, h - 1], fill=spec["colour"] + (255,), outline=(40, 40, 40, 255), width=2)
    else:
        draw.ellipse([0, 0, w - 1, h - 1], fill=spec["colour"] + (255,), outline=(40, 40, 40, 255), width=2)
    return img


def write_bundle(root, bundle_id, objects, fixtures, goals, order=None):
    out = root / bundle_id
    images = out / "images"
    images.mkdir(parents=True, exist_ok=True)
    manifest = {"id": bundle_id, "canvas": {"width": W, "height": H},
                "objects": {}, "fixtures": {}, "backgrounds": {}, "goalLocations": {}}
    for name, spec in objects.items():
        x, y, w, h = spec["box"]
        object_image(spec).save(images / f"{name}.png", optimize=True)
        manifest["objects"][name] = {"class": spec["cls"], "boundingBox": [x, y, w, h], "category": spec["category"],
                                     "isReceptacle": spec["receptacle"], "width": w, "height": h,
                                     "image": f"images/{name}.png"}
    for name, spec in fixtures.items():
        x, y, w, h = spec["box"]
        manifest["fixtures"][name] = {"class": spec["cls"], "boundingBox": [x, y, w, h], "category": spec["category"],
                                      "width": w, "height": h, "x": x, "y": y, "possibleStates": spec["states"]}
    names = sorted(fixtures)
    for states in itertools.product(*(fixtures[n]["states"] for n in names)):
        combo = list(zip(names, states))
        key = ";".join(f"{n}={s}" for n, s in combo)
        file = "background" + "".join(f"_{n}-{s}" for n, s in combo) + ".png"
        background(fixtures, combo).save(images / file, optimize=True)
        manifest["backgrounds"][key] = f"images/{file}"
    for name, entries in goals.items():
        manifest["goalLocations"][name] = [{"label": l, "x": x, "y": y} for l, x, y in entries]
    # Receptacles are drawn first so their contents stay visible.
    draw_order = order or sorted(objects, key=lambda n: (not objects[n]["receptacle"], n))
    manifest["initialState"] = {
        "caption": "Initial state",
        "objects": {n: {"x": s["box"][0], "y": s["box"][1]} for n, s in objects.items()},
        "fixtures": {n: {"state": s["states"][0]} for n, s in fixtures.items()},
        "objectOrder": draw_order,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def script(path, events, session):
    path.write_text(json.dumps({"session": session, "events": events}, indent=2) + "\n")


def drag(name, x, y):
    return {"type": "drag", "object": name, "x": x, "y": y}


def toggle(name):
    return {"type": "toggle", "fixture": name}


def main(root):
    root = pathlib.Path(root)

    # Pick-and-place case: one red apple among green apples, one white bowl.
    out = write_bundle(root, "red-apple", {
        "red_apple": obj("red apple", [100, 300, 40, 40], (200, 30, 30)),
        "green_apple_1": obj("green apple", [180, 300, 40, 40], (90, 170, 60)),
        "green_apple_2": obj("green apple", [240, 300, 40, 40], (90, 170, 60)),
        "white_bowl": obj("white bowl", [400, 280, 120, 80], (245, 245, 245), "dishware", True),
    }, {}, {"red_apple": [("white bowl", 440, 300)], "green_apple_1": [("white bowl", 420, 300)],
            "green_apple_2": [("white bowl", 460, 300)]})
    script(out / "demo.script.json", [drag("red_apple", 440, 300)], "red-apple-demo")

    # Stacking case: the plate already holds the pink donut.
    out = write_bundle(root, "donut-stack", {
        "plate": obj("plate", [360, 260, 160, 100], (250, 250, 240), "dishware", True),
        "pink_donut": obj("pink donut", [380, 280, 50, 50], (240, 140, 180)),
        "orange_donut": obj("orange donut", [100, 300, 50, 50], (240, 150, 40)),
        "spoon_1": obj("spoon", [40, 100, 20, 80], (180, 180, 190), "utensil", shape="rect"),
        "spoon_2": obj("spoon", [80, 100, 20, 80], (180, 180, 190), "utensil", shape="rect"),
    }, {}, {"orange_donut": [("plate", 450, 285)]})
    script(out / "demo.script.json", [drag("orange_donut", 450, 285)], "donut-stack-demo")

    # Washing case: the faucet is a two-state fixture over the sink.
    out = write_bundle(root, "faucet-wash", {
        "orange_1": obj("orange", [80, 320, 40, 40], (245, 150, 30)),
        "orange_2": obj("orange", [140, 320, 40, 40], (245, 150, 30)),
        "bowl": obj("bowl", [260, 300, 100, 70], (120, 160, 220), "dishware", True),
    }, {
        "faucet": fixture("faucet", [470, 60, 60, 50], ["off", "on"]),
        "sink": fixture("sink", [420, 140, 160, 120], ["ready"], "fixture"),
    }, {"orange_1": [("sink", 470, 180)], "orange_2": [("sink", 520, 180)]})
    script(out / "demo.script.json", [toggle("faucet")], "faucet-wash-demo")

    # Sorting: stow the bottle, then sort apples and bananas into bowls.
    out = write_bundle(root, "sorting-fruits", {
        "bowl_a": obj("blue bowl", [240, 340, 110, 80], (70, 110, 200), "dishware", True),
        "bowl_b": obj("green bowl", [380, 340, 110, 80], (70, 170, 90), "dishware", True),
        "bowl_c": obj("yellow bowl", [510, 340, 110, 80], (230, 200, 60), "dishware", True),
        "bottle": obj("bottle", [240, 80, 30, 70], (60, 140, 90), "container", shape="rect"),
        "big_red_apple": obj("big red apple", [300, 200, 50, 50], (200, 30, 30)),
        "small_red_apple": obj("small red apple", [370, 210, 34, 34], (210, 50, 40)),
        "ripe_banana": obj("ripe banana", [430, 200, 70, 30], (240, 210, 50)),
        "unripe_banana": obj("unripe banana", [520, 200, 70, 30], (150, 190, 60)),
    }, {
        "cabinet": fixture("cabinet", [20, 40, 160, 140], ["closed", "open"], "furniture"),
    }, {
        "bottle": [("cabinet shelf", 80, 80)],
        "big_red_apple": [("blue bowl", 255, 355)],
        "small_red_apple": [("blue bowl", 305, 360)],
        "ripe_banana": [("green bowl", 400, 365)],
        "unripe_banana": [("yellow bowl", 530, 365)],
    })
    oracle = [toggle("cabinet"), drag("bottle", 80, 80), toggle("cabinet"),
              drag("big_red_apple", 255, 355), drag("small_red_apple", 305, 360),
              drag("ripe_banana", 400, 365), drag("unripe_banana", 530, 365)]
    script(out / "oracle.script.json", oracle, "sorting-fruits-oracle")
    # Twelve gestures; the re-drags refine the step they follow, so seven steps remain.
    participant = [toggle("cabinet"),
                   drag("bottle", 200, 90), drag("bottle", 84, 78),
                   toggle("cabinet"),
                   drag("big_red_apple", 262, 350), drag("big_red_apple", 258, 356),
                   drag("small_red_apple", 300, 362),
                   drag("ripe_banana", 395, 360), drag("ripe_banana", 402, 368),
                   drag("unripe_banana", 470, 260), drag("unripe_banana", 532, 366),
                   {"type": "select", "index": 7}]
    script(out / "participant.script.json", participant, "sorting-fruits-participant")

    out = write_bundle(root, "storing-pantry", {
        "milk": obj("milk carton", [300, 300, 36, 70], (245, 245, 250), "drink", shape="rect"),
        "cheese": obj("cheese", [360, 330, 50, 36], (250, 210, 80), shape="rect"),
        "cereal": obj("cereal box", [440, 290, 50, 80], (200, 80, 60), "pantry", shape="rect"),
        "pasta": obj("pasta bag", [520, 310, 60, 60], (230, 190, 120), "pantry", shape="rect"),
    }, {
        "fridge": fixture("fridge", [20, 40, 160, 240], ["closed", "open"]),
        "shelf": fixture("shelf", [420, 40, 200, 120], ["ready"], "furniture"),
    }, {
        "milk": [("fridge", 60, 100)], "cheese": [("fridge", 100, 200)],
        "cereal": [("shelf", 450, 60)], "pasta": [("shelf", 530, 70)],
    })
    script(out / "oracle.script.json",
           [toggle("fridge"), drag("milk", 60, 100), drag("cheese", 100, 200), toggle("fridge"),
            drag("cereal", 450, 60), drag("pasta", 530, 70)], "storing-pantry-oracle")

    out = write_bundle(root, "cooking-stirfry", {
        "pan": obj("pan", [60, 320, 130, 90], (60, 60, 60), "cookware", True),
        "broccoli": obj("broccoli", [260, 330, 44, 44], (50, 140, 60)),
        "carrot": obj("carrot", [330, 340, 60, 24], (240, 120, 30), shape="rect"),
        "tofu": obj("tofu", [420, 335, 40, 34], (245, 240, 220), shape="rect"),
    }, {
        "stove": fixture("stove", [400, 60, 180, 130], ["off", "on"]),
    }, {
        "pan": [("stove", 425, 80)], "broccoli": [("pan", 440, 95)],
        "carrot": [("pan", 470, 130)], "tofu": [("pan", 500, 100)],
    })
    script(out / "oracle.script.json",
           [drag("pan", 425, 80), toggle("stove"), drag("broccoli", 440, 95), drag("carrot", 470, 130),
            drag("tofu", 500, 100), toggle("stove")], "cooking-stirfry-oracle")

    out = write_bundle(root, "washing-dishes", {
        "plate": obj("plate", [60, 330, 90, 60], (250, 250, 240), "dishware"),
        "cup": obj("cup", [180, 340, 40, 50], (200, 220, 240), "dishware", shape="rect"),
    }, {
        "faucet": fixture("faucet", [300, 40, 60, 50], ["off", "on"]),
        "sink": fixture("sink", [240, 110, 180, 120], ["ready"], "fixture"),
        "rack": fixture("rack", [460, 250, 160, 120], ["ready"], "furniture"),
    }, {
        "plate": [("sink", 270, 140), ("rack", 480, 270)],
        "cup": [("sink", 360, 150), ("rack", 560, 280)],
    })
    script(out / "oracle.script.json",
           [drag("plate", 270, 140), drag("cup", 360, 150), toggle("faucet"), toggle("faucet"),
            drag("plate", 480, 270), drag("cup", 560, 280)], "washing-dishes-oracle")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[2] / "bundles")
