#!/usr/bin/env python3
# Copyright 2026 The Teleop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the fixture robot descriptions in this directory.

  arm7_*.urdf   7-DoF S-R-S arm (z y z y z y z) with a prismatic gripper
  ur5_*.urdf    UR5-like 6-DoF arm, used as a half-scale puppeteer leader
  planar_2r.urdf is written by hand.
"""
import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def fmt(v):
    return " ".join(f"{x:.12g}" for x in v)


def link(name):
    return f'  <link name="{name}"/>\n'


def joint(name, kind, parent, child, xyz=(0, 0, 0), rpy=(0, 0, 0), axis=None, limit=None):
    out = f'  <joint name="{name}" type="{kind}">\n'
    out += f'    <parent link="{parent}"/>\n    <child link="{child}"/>\n'
    out += f'    <origin xyz="{fmt(xyz)}" rpy="{fmt(rpy)}"/>\n'
    if axis is not None:
        out += f'    <axis xyz="{fmt(axis)}"/>\n'
    if limit is not None:
        lo, hi, vel = limit
        out += f'    <limit lower="{lo:.12g}" upper="{hi:.12g}" velocity="{vel:.6g}" effort="10"/>\n'
    out += "  </joint>\n"
    return out


def arm7(prefix, parent, mount_xyz, mount_rpy=(0, 0, 0), scale=1.0):
    s = scale
    z, y = (0, 0, 1), (0, 1, 0)
    spec = [
        # (axis, origin z offset, lower, upper, velocity)
        (z, 0.15, -2.9, 2.9, 2.0),
        (y, 0.15, -2.0, 2.0, 2.0),
        (z, 0.20, -2.9, 2.9, 2.0),
        (y, 0.20, -0.3, 2.9, 2.0),
        (z, 0.175, -2.9, 2.9, 2.5),
        (y, 0.175, -2.0, 2.0, 2.5),
        (z, 0.08, -2.9, 2.9, 2.5),
    ]
    out = joint(f"{prefix}mount", "fixed", parent, f"{prefix}link0", mount_xyz, mount_rpy)
    out += link(f"{prefix}link0")
    for i, (axis, dz, lo, hi, vel) in enumerate(spec, start=1):
        out += link(f"{prefix}link{i}")
        out += joint(f"{prefix}joint{i}", "revolute", f"{prefix}link{i - 1}", f"{prefix}link{i}",
                     (0, 0, dz * s), axis=axis, limit=(lo, hi, vel))
    out += link(f"{prefix}ee")
    out += joint(f"{prefix}ee_fixed", "fixed", f"{prefix}link7", f"{prefix}ee", (0, 0, 0.10 * s))
    out += link(f"{prefix}finger")
    out += joint(f"{prefix}gripper", "prismatic", f"{prefix}ee", f"{prefix}finger", axis=(0, 1, 0),
                 limit=(0.0, 0.04 * s, 0.2))
    return out


def ur5(prefix, parent, mount_xyz, mount_rpy=(0, 0, 0), scale=1.0):
    s = scale
    h = math.pi / 2
    out = joint(f"{prefix}mount", "fixed", parent, f"{prefix}base_link", mount_xyz, mount_rpy)
    out += link(f"{prefix}base_link")
    chain = [
        ("shoulder_pan", "base_link", "shoulder_link", (0, 0, 0.089159), (0, 0, 0), (0, 0, 1), 3.15),
        ("shoulder_lift", "shoulder_link", "upper_arm_link", (0, 0.13585, 0), (0, h, 0), (0, 1, 0), 3.15),
        ("elbow", "upper_arm_link", "forearm_link", (0, -0.1197, 0.425), (0, 0, 0), (0, 1, 0), 3.15),
        ("wrist_1", "forearm_link", "wrist_1_link", (0, 0, 0.39225), (0, h, 0), (0, 1, 0), 3.2),
        ("wrist_2", "wrist_1_link", "wrist_2_link", (0, 0.093, 0), (0, 0, 0), (0, 0, 1), 3.2),
        ("wrist_3", "wrist_2_link", "wrist_3_link", (0, 0, 0.09465), (0, 0, 0), (0, 1, 0), 3.2),
    ]
    for name, parent_link, child_link, xyz, rpy, axis, vel in chain:
        out += link(f"{prefix}{child_link}")
        out += joint(f"{prefix}{name}", "revolute", f"{prefix}{parent_link}", f"{prefix}{child_link}",
                     tuple(c * s for c in xyz), rpy, axis, (-2 * math.pi, 2 * math.pi, vel))
    out += link(f"{prefix}ee_link")
    out += joint(f"{prefix}ee_fixed", "fixed", f"{prefix}wrist_3_link", f"{prefix}ee_link",
                 (0, 0.0823 * s, 0), (0, 0, h))
    out += link(f"{prefix}tool")
    # Tool frame with z pointing out of the flange.
    out += joint(f"{prefix}tool_fixed", "fixed", f"{prefix}ee_link", f"{prefix}tool", (0, 0, 0), (0, h, 0))
    out += link(f"{prefix}finger")
    out += joint(f"{prefix}gripper", "revolute", f"{prefix}tool", f"{prefix}finger", axis=(1, 0, 0),
                 limit=(0.0, 0.8, 2.0))
    return out


def robot(name, body):
    return f'<?xml version="1.0"?>\n<robot name="{name}">\n  <link name="world"/>\n{body}</robot>\n'


ARM_MOUNTS = {
    "": [("", (0, 0, 0))],
    "dual": [("left_", (0, 0.35, 0)), ("right_", (0, -0.35, 0))],
    "quad": [("a_", (0, 1.05, 0)), ("b_", (0, 0.35, 0)), ("c_", (0, -0.35, 0)), ("d_", (0, -1.05, 0))],
}


def main():
    files = {
        "arm7.urdf": robot("arm7", arm7("", "world", (0, 0, 0))),
        "arm7_dual_table.urdf": robot("arm7_dual_table", "".join(arm7(p, "world", m) for p, m in ARM_MOUNTS["dual"])),
        "arm7_quad_table.urdf": robot("arm7_quad_table", "".join(arm7(p, "world", m) for p, m in ARM_MOUNTS["quad"])),
        "arm7_puppeteer_quad.urdf": robot(
            "arm7_puppeteer_quad", "".join(arm7(p, "world", tuple(0.5 * c for c in m), scale=0.5)
                                           for p, m in ARM_MOUNTS["quad"])),
        "ur5_puppeteer.urdf": robot("ur5_puppeteer", ur5("", "world", (0, 0, 0), scale=0.5)),
        "ur5_puppeteer_quad.urdf": robot(
            "ur5_puppeteer_quad", "".join(ur5(p, "world", tuple(0.5 * c for c in m), scale=0.5)
                                          for p, m in ARM_MOUNTS["quad"])),
    }
    for name, text in files.items():
        (HERE / name).write_text(text)
        print("wrote", name)


if __name__ == "__main__":
    main()
