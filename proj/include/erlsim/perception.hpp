#pragma once

#include "erlsim/world_state.hpp"

namespace erl {

/// Proximity signal: 1 when adjacent, falling linearly to 0.5 at max_dist,
/// 0 beyond it.
inline double dist_value(int dist, int max_dist) {
  if (dist < 1) throw ContractViolation("dist_value: dist must be >= 1");
  if (dist > max_dist) return 0.0;
  if (dist == 1) return 1.0;
  return 1.0 - 0.5 * static_cast<double>(dist - 1) / static_cast<double>(max_dist - 1);
}

/// How a cell reads on an agent's sensors. Sheltered agents read as their tree;
/// corpses read as food on the plant channel.
inline SensedType sensed_type(const Cell& c) noexcept {
  switch (c.kind) {
    case CellKind::Empty: return SensedType::Empty;
    case CellKind::Wall: return SensedType::Wall;
    case CellKind::Plant: return SensedType::Plant;
    case CellKind::Tree: return SensedType::Tree;
    case CellKind::Carnivore: return SensedType::Carnivore;
    case CellKind::Agent: return SensedType::Agent;
    case CellKind::Corpse: return SensedType::Plant;
  }
  return SensedType::Empty;
}

/// Axis-aligned rays of length agent_view_dist in N, E, W, S order. Rays are
/// not occluded: each type reports its nearest occurrence on the ray.
inline Observation observe(const WorldState& world, const AgentState& agent) {
  Observation obs;
  const int view = world.cfg.agent_view_dist;
  for (Action dir : kActions) {
    const Offset step = offset_of(dir);
    Pos p = agent.pos;
    for (int dist = 1; dist <= view; ++dist) {
      p = p + step;
      if (!world.in_bounds(p)) break;
      const int idx = feature_index(dir, sensed_type(world.at(p)));
      if (obs[idx] == 0.0) obs[idx] = dist_value(dist, view);
    }
  }
  obs[kHealthIdx] = agent.health / world.cfg.max_health;
  obs[kEnergyIdx] = agent.energy / world.cfg.max_energy;
  obs[kInTreeIdx] = agent.in_tree ? 1.0 : 0.0;
  obs[kBiasIdx] = 1.0;
  return obs;
}

}  // namespace erl
