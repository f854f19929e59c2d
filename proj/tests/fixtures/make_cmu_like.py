"""Writes clips on the 31-joint CMU skeleton (cgspeed BVH layout) with
synthetic motion. Run from this directory: python3 make_cmu_like.py"""
import math

# name, parent, offset, end-site offset
JOINTS = [
    ("Hips", None, (0, 0, 0), None),
    ("LHipJoint", "Hips", (0, 0, 0), None),
    ("LeftUpLeg", "LHipJoint", (1.65674, -1.80282, 0.62477), None),
    ("LeftLeg", "LeftUpLeg", (2.59720, -7.13576, 0), None),
    ("LeftFoot", "LeftLeg", (2.49236, -6.84770, 0), None),
    ("LeftToeBase", "LeftFoot", (0.19704, -0.54136, 2.14581), (0, 0, 1.11249)),
    ("RHipJoint", "Hips", (0, 0, 0), None),
    ("RightUpLeg", "RHipJoint", (-1.61070, -1.80282, 0.62476), None),
    ("RightLeg", "RightUpLeg", (-2.59502, -7.12977, 0), None),
    ("RightFoot", "RightLeg", (-2.46780, -6.78024, 0), None),
    ("RightToeBase", "RightFoot", (-0.23024, -0.63258, 2.13368), (0, 0, 1.11569)),
    ("LowerBack", "Hips", (0, 0, 0), None),
    ("Spine", "LowerBack", (0.01961, 2.05450, -0.14112), None),
    ("Spine1", "Spine", (0.01021, 2.06436, -0.05921), None),
    ("Neck", "Spine1", (0, 0, 0), None),
    ("Neck1", "Neck", (0.00713, 1.56711, 0.14968), None),
    ("Head", "Neck1", (0.03429, 1.56041, -0.10006), (0.01305, 1.62560, -0.04834)),
    ("LeftShoulder", "Spine1", (0, 0, 0), None),
    ("LeftArm", "LeftShoulder", (3.54205, 0.90436, -0.17364), None),
    ("LeftForeArm", "LeftArm", (4.86513, 0, 0), None),
    ("LeftHand", "LeftForeArm", (3.35554, 0, 0), None),
    ("LeftFingerBase", "LeftHand", (0, 0, 0), None),
    ("LeftHandIndex1", "LeftFingerBase", (0.66117, 0, 0), (0.53316, 0, 0)),
    ("LThumb", "LeftHand", (0, 0, 0), (0.54209, 0, 0.54209)),
    ("RightShoulder", "Spine1", (0, 0, 0), None),
    ("RightArm", "RightShoulder", (-3.49802, 0.75994, -0.32616), None),
    ("RightForeArm", "RightArm", (-5.02649, 0, 0), None),
    ("RightHand", "RightForeArm", (-3.36431, 0, 0), None),
    ("RightFingerBase", "RightHand", (0, 0, 0), None),
    ("RightHandIndex1", "RightFingerBase", (-0.73041, 0, 0), (-0.58887, 0, 0)),
    ("RThumb", "RightHand", (0, 0, 0), (-0.57832, 0, 0.57832)),
]
NAMES = [j[0] for j in JOINTS]


def hierarchy():
    children = {}
    for name, parent, _, _ in JOINTS:
        children.setdefault(parent, []).append(name)
    info = {j[0]: j for j in JOINTS}
    out = ["HIERARCHY"]

    def emit(name, depth):
        pad = "  " * depth
        _, parent, off, end = info[name]
        out.append(f"{pad}{'ROOT' if parent is None else 'JOINT'} {name}")
        out.append(pad + "{")
        out.append(f"{pad}  OFFSET {off[0]:.5f} {off[1]:.5f} {off[2]:.5f}")
        if parent is None:
            out.append(f"{pad}  CHANNELS 6 Xposition Yposition Zposition Zrotation Yrotation Xrotation")
        else:
            out.append(f"{pad}  CHANNELS 3 Zrotation Yrotation Xrotation")
        for c in children.get(name, []):
            emit(c, depth + 1)
        if end is not None:
            out.append(f"{pad}  End Site")
            out.append(pad + "  {")
            out.append(f"{pad}    OFFSET {end[0]:.5f} {end[1]:.5f} {end[2]:.5f}")
            out.append(pad + "  }")
        out.append(pad + "}")

    emit("Hips", 0)
    return out


def write(path, frames, pose):
    lines = hierarchy()
    lines += ["MOTION", f"Frames: {frames}", "Frame Time: 0.0333333"]
    for f in range(frames):
        root, rot = pose(f)
        row = list(root)
        for name in NAMES:
            z, y, x = rot.get(name, (0.0, 0.0, 0.0))
            row += [z, y, x]
        lines.append(" ".join(f"{v:.4f}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def walk(f):
    t = 2 * math.pi * f / 30
    s = math.sin(t)
    rot = {
        "Hips": (2 * s, 5 * math.sin(t / 2), 0),
        "LeftUpLeg": (0, 0, -25 * s),
        "RightUpLeg": (0, 0, 25 * s),
        "LeftLeg": (0, 0, 30 * max(0.0, s)),
        "RightLeg": (0, 0, 30 * max(0.0, -s)),
        "LeftArm": (-70, 0, 20 * s),
        "RightArm": (70, 0, -20 * s),
        "LeftForeArm": (0, -15, 0),
        "RightForeArm": (0, 15, 0),
        "Head": (0, 10 * math.sin(t / 2), 0),
    }
    return (0.3 * s, 17.0 + 0.4 * math.cos(2 * t), 0.5 * f), rot


def pushup(f):
    t = 2 * math.pi * f / 40
    bend = 45 * (1 - math.cos(t))  # 0 (arms straight) .. 90
    rot = {
        "Hips": (0, 0, 90),  # body horizontal, face down
        "LeftArm": (-80 + bend * 0.3, 0, 0),
        "RightArm": (80 - bend * 0.3, 0, 0),
        "LeftForeArm": (0, bend, 0),
        "RightForeArm": (0, -bend, 0),
        "Head": (0, 0, -20),
    }
    return (0.0, 6.0 - 4.0 * bend / 90.0, 0.0), rot


def wave(f):
    t = 2 * math.pi * f / 24
    rot = {
        "RightArm": (-60, 0, 0),
        "RightForeArm": (0, 0, 0),
        "RightHand": (30 * math.sin(t), 0, 0),
        "LeftArm": (-70, 0, 0),
    }
    rot["RightForeArm"] = (40 + 30 * math.sin(t), 0, 0)
    return (0.0, 17.0, 0.0), rot


if __name__ == "__main__":
    write("cmu_walk.bvh", 60, walk)
    write("cmu_pushup.bvh", 40, pushup)
    write("cmu_wave.bvh", 24, wave)
