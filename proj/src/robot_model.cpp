// Copyright 2026 The Teleop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teleop/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "teleop/xml.hpp"

namespace teleop {

JointVector LimbChain::lower_limits() const {
  JointVector v(dof());
  for (std::size_t i = 0; i < dof(); ++i) v[i] = joints[i].lower;
  return v;
}

JointVector LimbChain::upper_limits() const {
  JointVector v(dof());
  for (std::size_t i = 0; i < dof(); ++i) v[i] = joints[i].upper;
  return v;
}

JointVector LimbChain::velocity_limits() const {
  JointVector v(dof());
  for (std::size_t i = 0; i < dof(); ++i) v[i] = joints[i].velocity_limit;
  return v;
}

std::vector<std::string> LimbChain::joint_names() const {
  std::vector<std::string> out;
  out.reserve(dof());
  for (const auto& j : joints) out.push_back(j.name);
  return out;
}

bool LimbChain::within_limits(const JointVector& q, double tol) const {
  if (static_cast<std::size_t>(q.size()) != dof()) {
    return false;
  }
  for (std::size_t i = 0; i < dof(); ++i) {
    if (!(q[i] >= joints[i].lower - tol && q[i] <= joints[i].upper + tol)) {
      return false;
    }
  }
  return true;
}

JointVector LimbChain::clamp(const JointVector& q) const {
  JointVector out = q;
  for (std::size_t i = 0; i < dof(); ++i) {
    out[i] = std::clamp(q[i], joints[i].lower, joints[i].upper);
  }
  return out;
}

std::optional<std::size_t> RobotModel::limb_index(std::string_view limb) const {
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    if (limbs[i].name == limb) {
      return i;
    }
  }
  return std::nullopt;
}

const LimbChain& RobotModel::limb(std::string_view limb) const {
  const auto i = limb_index(limb);
  if (!i) {
    throw ConfigError("unknown limb '" + std::string(limb) + "'");
  }
  return limbs[*i];
}

std::vector<std::string> RobotModel::limb_names() const {
  std::vector<std::string> out;
  for (const auto& l : limbs) out.push_back(l.name);
  return out;
}

namespace {

struct RawJoint {
  std::string name;
  std::string type;
  std::string parent;
  std::string child;
  Pose origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> velocity;
  int line = 0;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const std::string& context) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw StructureError(context + ": not a number '" + token + "'");
    }
  }
  if (out.size() != expected) {
    throw StructureError(context + ": expected " + std::to_string(expected) + " numbers, got '" + text + "'");
  }
  return out;
}

double parse_number(const std::string& text, const std::string& context) {
  return parse_numbers(text, 1, context)[0];
}

Pose parse_origin(const xml::Element* origin, const std::string& context) {
  if (origin == nullptr) {
    return Pose();
  }
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
  if (auto v = origin->attribute("xyz")) {
    const auto n = parse_numbers(*v, 3, context + " origin xyz");
    xyz = {n[0], n[1], n[2]};
  }
  if (auto v = origin->attribute("rpy")) {
    const auto n = parse_numbers(*v, 3, context + " origin rpy");
    rpy = {n[0], n[1], n[2]};
  }
  return Pose::from_rpy(rpy.x(), rpy.y(), rpy.z(), xyz);
}

void collect_meshes(const xml::Element& el, const std::string& owner, std::vector<std::string>& warnings) {
  for (const auto& c : el.children) {
    if (c.name == "mesh") {
      warnings.push_back("ignored mesh '" + c.attribute("filename").value_or("") + "' in " + owner);
    }
    collect_meshes(c, owner, warnings);
  }
}

void warn_ignored(const xml::Element& el, const std::string& owner, std::vector<std::string>& warnings) {
  warnings.push_back("ignored <" + el.name + "> in " + owner + " (line " + std::to_string(el.line) + ")");
  if (el.name == "mesh") {
    warnings.back() = "ignored mesh '" + el.attribute("filename").value_or("") + "' in " + owner;
  }
  collect_meshes(el, owner, warnings);
}

RawJoint read_joint(const xml::Element& el, std::vector<std::string>& warnings) {
  RawJoint j;
  j.line = el.line;
  j.name = el.attribute("name").value_or("");
  if (j.name.empty()) {
    throw StructureError("joint without name at line " + std::to_string(el.line));
  }
  const std::string ctx = "joint '" + j.name + "'";
  j.type = el.attribute("type").value_or("");
  if (j.type != "revolute" && j.type != "continuous" && j.type != "prismatic" && j.type != "fixed") {
    throw UnsupportedJointError("unsupported joint type '" + j.type + "' for " + ctx);
  }
  const auto* parent = el.child("parent");
  const auto* child = el.child("child");
  if (parent == nullptr || !parent->attribute("link") || child == nullptr || !child->attribute("link")) {
    throw StructureError(ctx + " needs <parent link> and <child link>");
  }
  j.parent = *parent->attribute("link");
  j.child = *child->attribute("link");
  j.origin = parse_origin(el.child("origin"), ctx);

  if (const auto* axis = el.child("axis"); axis != nullptr && axis->attribute("xyz")) {
    const auto n = parse_numbers(*axis->attribute("xyz"), 3, ctx + " axis");
    j.axis = {n[0], n[1], n[2]};
  }
  if (j.type != "fixed") {
    const double norm = j.axis.norm();
    if (!(norm > 1e-12)) {
      throw StructureError(ctx + " has a zero axis");
    }
    j.axis /= norm;
  }

  if (const auto* limit = el.child("limit"); limit != nullptr) {
    if (auto v = limit->attribute("lower")) j.lower = parse_number(*v, ctx + " limit lower");
    if (auto v = limit->attribute("upper")) j.upper = parse_number(*v, ctx + " limit upper");
    if (auto v = limit->attribute("velocity")) j.velocity = parse_number(*v, ctx + " limit velocity");
  }
  if (j.type == "continuous") {
    j.lower = -kContinuousLimit;
    j.upper = kContinuousLimit;
  }
  if (j.type != "fixed") {
    if (!j.velocity) {
      throw StructureError(ctx + " is missing a velocity limit");
    }
    if (!(*j.velocity > 0.0)) {
      throw StructureError(ctx + " has a non-positive velocity limit");
    }
    if (j.lower > j.upper) {
      throw StructureError(ctx + " has lower limit greater than upper limit");
    }
  }

  for (const auto& c : el.children) {
    if (c.name != "parent" && c.name != "child" && c.name != "origin" && c.name != "axis" && c.name != "limit") {
      warn_ignored(c, ctx, warnings);
    }
  }
  return j;
}

JointSpec to_spec(const RawJoint& raw, const Pose& folded_origin) {
  JointSpec s;
  s.name = raw.name;
  s.kind = raw.type == "prismatic" ? JointKind::kPrismatic
           : raw.type == "fixed"   ? JointKind::kFixed
                                   : JointKind::kRevolute;
  s.continuous = raw.type == "continuous";
  s.axis = raw.axis;
  s.origin = folded_origin;
  s.lower = raw.lower;
  s.upper = raw.upper;
  s.velocity_limit = raw.velocity.value_or(1.0);
  return s;
}

Pose joint_motion(const JointSpec& j, double q) {
  if (j.kind == JointKind::kPrismatic) {
    return Pose::from_translation(j.axis * q);
  }
  return Pose(Eigen::AngleAxisd(q, j.axis).toRotationMatrix(), Eigen::Vector3d::Zero());
}

void check_dimensions(const LimbChain& chain, const JointVector& q) {
  if (chain.dof() == 0) {
    throw DimensionError("limb '" + chain.name + "' has no movable joints");
  }
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw DimensionError("limb '" + chain.name + "' expects " + std::to_string(chain.dof()) +
                         " joint values, got " + std::to_string(q.size()));
  }
}

}  // namespace

ParsedRobot parse_robot_description(std::string_view xml_text, std::span<const LimbSelection> selections) {
  const xml::Element root = xml::parse(xml_text);
  if (root.name != "robot") {
    throw StructureError("root element must be <robot>, found <" + root.name + ">");
  }
  ParsedRobot out;
  out.model.name = root.attribute("name").value_or("");
  auto& warnings = out.warnings;

  std::set<std::string> links;
  std::map<std::string, RawJoint> joints;
  std::map<std::string, std::string> parent_joint_of;  // child link -> joint name

  for (const auto& el : root.children) {
    if (el.name == "link") {
      const auto name = el.attribute("name").value_or("");
      if (name.empty()) {
        throw StructureError("link without name at line " + std::to_string(el.line));
      }
      if (!links.insert(name).second) {
        throw StructureError("duplicate link '" + name + "'");
      }
      for (const auto& c : el.children) {
        warn_ignored(c, "link '" + name + "'", warnings);
      }
    } else if (el.name == "joint") {
      RawJoint j = read_joint(el, warnings);
      if (joints.count(j.name) != 0) {
        throw StructureError("duplicate joint '" + j.name + "'");
      }
      joints.emplace(j.name, std::move(j));
    } else {
      warn_ignored(el, "robot", warnings);
    }
  }

  for (const auto& [name, j] : joints) {
    if (links.count(j.parent) == 0) {
      throw StructureError("joint '" + name + "' references unknown parent link '" + j.parent + "'");
    }
    if (links.count(j.child) == 0) {
      throw StructureError("joint '" + name + "' references unknown child link '" + j.child + "'");
    }
    if (!parent_joint_of.emplace(j.child, name).second) {
      throw StructureError("link '" + j.child + "' has multiple parent joints");
    }
  }

  // Every parent walk must terminate at a root.
  for (const auto& link : links) {
    std::set<std::string> seen{link};
    std::string cur = link;
    for (auto it = parent_joint_of.find(cur); it != parent_joint_of.end(); it = parent_joint_of.find(cur)) {
      cur = joints.at(it->second).parent;
      if (!seen.insert(cur).second) {
        throw StructureError("cyclic joint graph through link '" + cur + "'");
      }
    }
  }

  std::set<std::string> limb_names;
  for (const auto& sel : selections) {
    if (!limb_names.insert(sel.name).second) {
      throw ConfigError("duplicate limb name '" + sel.name + "'");
    }
    for (const auto* link : {&sel.base_link, &sel.tip_link}) {
      if (links.count(*link) == 0) {
        throw ChainExtractionError(*link);
      }
    }
    // Walk tip -> base.
    std::vector<const RawJoint*> path;
    for (std::string cur = sel.tip_link; cur != sel.base_link;) {
      const auto it = parent_joint_of.find(cur);
      if (it == parent_joint_of.end()) {
        throw ChainExtractionError(sel.base_link);
      }
      path.push_back(&joints.at(it->second));
      cur = path.back()->parent;
    }
    std::reverse(path.begin(), path.end());

    LimbChain chain;
    chain.name = sel.name;
    chain.base_link = sel.base_link;
    chain.tip_link = sel.tip_link;
    for (std::string cur = sel.base_link;;) {
      const auto it = parent_joint_of.find(cur);
      if (it == parent_joint_of.end()) break;
      const RawJoint& up = joints.at(it->second);
      if (up.type != "fixed") {
        warnings.push_back("base of limb '" + sel.name + "' is moved by joint '" + up.name +
                           "'; its placement assumes zero joint position");
      }
      chain.base_in_root = up.origin * chain.base_in_root;
      cur = up.parent;
    }

    // Frame each link is rigidly attached to, with the offset from that frame.
    struct Attachment {
      int frame;
      Pose offset;
    };
    std::map<std::string, Attachment> attached;
    attached[sel.base_link] = {-1, Pose()};
    Pose pending;
    for (const RawJoint* j : path) {
      if (j->type == "fixed") {
        pending = pending * j->origin;
        const auto& parent = attached.at(j->parent);
        attached[j->child] = {parent.frame, parent.offset * j->origin};
      } else {
        chain.joints.push_back(to_spec(*j, pending * j->origin));
        pending = Pose();
        attached[j->child] = {static_cast<int>(chain.joints.size()) - 1, Pose()};
      }
    }
    chain.eef_frame = pending;
    if (chain.joints.empty()) {
      throw StructureError("limb '" + sel.name + "' has no movable joints between '" + sel.base_link + "' and '" +
                           sel.tip_link + "'");
    }

    if (sel.gripper_joint) {
      const auto it = joints.find(*sel.gripper_joint);
      if (it == joints.end()) {
        throw ConfigError("limb '" + sel.name + "': unknown gripper joint '" + *sel.gripper_joint + "'");
      }
      for (const RawJoint* j : path) {
        if (j->name == *sel.gripper_joint) {
          throw ConfigError("limb '" + sel.name + "': gripper joint '" + j->name + "' lies on the IK chain");
        }
      }
      if (it->second.type == "fixed") {
        throw ConfigError("limb '" + sel.name + "': gripper joint '" + it->first + "' is fixed");
      }
      chain.gripper_joint = to_spec(it->second, it->second.origin);
    }

    for (const auto& s : sel.spheres) {
      const auto it = attached.find(s.link);
      if (it == attached.end() || it->second.frame < 0) {
        throw ConfigError("limb '" + sel.name + "': collision sphere link '" + s.link +
                          "' is not moved by the limb's joints");
      }
      if (!(s.radius > 0.0)) {
        throw ConfigError("limb '" + sel.name + "': collision sphere radius must be positive");
      }
      chain.collision_spheres.push_back({it->second.frame, it->second.offset * s.center, s.radius});
    }

    JointVector base = JointVector::Zero(static_cast<Eigen::Index>(chain.dof()));
    if (sel.base_pose) {
      if (sel.base_pose->size() != chain.dof()) {
        throw ConfigError("limb '" + sel.name + "': base pose has " + std::to_string(sel.base_pose->size()) +
                          " entries, chain has " + std::to_string(chain.dof()) + " joints");
      }
      for (std::size_t i = 0; i < chain.dof(); ++i) base[i] = (*sel.base_pose)[i];
      if (!chain.within_limits(base)) {
        throw ConfigError("limb '" + sel.name + "': base pose outside joint limits");
      }
    } else {
      base = chain.clamp(base);
    }
    out.model.limbs.push_back(std::move(chain));
    out.model.base_pose.push_back(std::move(base));
  }
  return out;
}

Pose forward_kinematics(const LimbChain& chain, const JointVector& q) {
  check_dimensions(chain, q);
  Pose t;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    t = t * chain.joints[i].origin * joint_motion(chain.joints[i], q[i]);
  }
  return t * chain.eef_frame;
}

std::vector<Pose> frame_positions(const LimbChain& chain, const JointVector& q) {
  check_dimensions(chain, q);
  std::vector<Pose> frames;
  frames.reserve(chain.dof() + 1);
  Pose t;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    t = t * chain.joints[i].origin * joint_motion(chain.joints[i], q[i]);
    frames.push_back(t);
  }
  frames.push_back(t * chain.eef_frame);
  return frames;
}

Jacobian geometric_jacobian(const LimbChain& chain, const JointVector& q) {
  const auto frames = frame_positions(chain, q);
  const Eigen::Vector3d p_eef = frames.back().translation();
  Jacobian jac(6, static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const Eigen::Vector3d z = frames[i].rotation() * chain.joints[i].axis;
    const auto col = static_cast<Eigen::Index>(i);
    if (chain.joints[i].kind == JointKind::kPrismatic) {
      jac.col(col) << z, Eigen::Vector3d::Zero();
    } else {
      jac.col(col) << z.cross(p_eef - frames[i].translation()), z;
    }
  }
  return jac;
}

Jacobian body_jacobian(const LimbChain& chain, const JointVector& q) {
  const Eigen::Matrix3d rt = forward_kinematics(chain, q).rotation().transpose();
  return rotate6(rt) * geometric_jacobian(chain, q);
}

}  // namespace teleop
