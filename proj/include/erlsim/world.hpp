#pragma once

// Gridworld dynamics. One call to step_world runs, in order:
//   1. move_carnivores            (ascending carnivore id)
//   2. resolve_agent_move          (ascending agent id)
//   3. grow_plants, update_trees, decay_corpses, spawn_carnivore (when due)
//   4. reproduction                (ascending agent id)
//   5. t += 1
// Environment draws come from sub-streams keyed by (t, purpose), so the
// candidate cells a step considers do not depend on what the agents did.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "erlsim/adaptation.hpp"
#include "erlsim/rng.hpp"
#include "erlsim/world_state.hpp"

namespace erl {

class WorldInitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-trial random streams consumed by the simulation loop.
struct TrialStreams {
  enum class EnvPurpose : std::uint64_t { Plants = 1, Trees = 2, Spawn = 3 };

  std::uint64_t env_key = 0;
  RngStream carnivores;
  RngStream policy;
  RngStream mutation;

  static TrialStreams for_seed(std::uint64_t trial_seed) {
    TrialStreams s;
    s.env_key = make_stream(trial_seed, "env-dynamics").next();
    s.carnivores = make_stream(trial_seed, "carnivores");
    s.policy = make_stream(trial_seed, "policy");
    s.mutation = make_stream(trial_seed, "mutation");
    return s;
  }

  RngStream env(std::int64_t t, EnvPurpose purpose) const noexcept {
    return RngStream::keyed(env_key, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(purpose));
  }
};

struct AgentAction {
  EntityId agent;
  Action action;
};

namespace detail {

inline bool depleted(double v) noexcept { return v <= kDepletedEps; }

inline void kill_agent(WorldState& w, AgentState& a, std::string_view cause, StepEvents& ev) {
  a.alive = false;
  Cell& c = w.at(a.pos);
  if (a.in_tree) {
    c.id = kNoEntity;  // the shelter stays; the meat is out of reach
  } else {
    c = Cell{CellKind::Corpse, kNoEntity, w.cfg.energy_gain_meat};
  }
  ev.add({w.t, EventKind::Death, a.id, a.pos, cause, kNoEntity});
}

inline void check_death(WorldState& w, AgentState& a, StepEvents& ev) {
  if (!a.alive) return;
  if (depleted(a.energy)) {
    a.energy = 0.0;
    kill_agent(w, a, "energy", ev);
  } else if (depleted(a.health)) {
    a.health = 0.0;
    kill_agent(w, a, "health", ev);
  }
}

inline int plant_neighbors(const WorldState& w, Pos p) noexcept {
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const Pos q{p.x + dx, p.y + dy};
      if (w.in_bounds(q) && w.at(q).kind == CellKind::Plant) ++n;
    }
  }
  return n;
}

inline bool carnivore_passable(CellKind k) noexcept {
  return k == CellKind::Empty || k == CellKind::Corpse;
}

}  // namespace detail

/// Boundary walls, then internal walls, plants, trees, carnivores and agents
/// on distinct interior cells drawn from `rng`. Agents get BrownianGenome
/// placeholders; the caller installs real genomes.
inline WorldState init_world(const SimConfig& cfg, RngStream& rng) {
  require_valid(cfg);
  WorldState w;
  w.cfg = cfg;
  w.width = cfg.world_width;
  w.height = cfg.world_height;
  w.cells.assign(static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height), Cell{});

  std::vector<std::size_t> interior;
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      if (x == 0 || y == 0 || x == w.width - 1 || y == w.height - 1) {
        w.at({x, y}).kind = CellKind::Wall;
      } else {
        interior.push_back(w.index({x, y}));
      }
    }
  }

  const std::size_t wanted = static_cast<std::size_t>(cfg.internal_wall_count) +
                             static_cast<std::size_t>(cfg.initial_plant_count) +
                             static_cast<std::size_t>(cfg.initial_tree_count) +
                             static_cast<std::size_t>(cfg.initial_carnivore_count) +
                             static_cast<std::size_t>(cfg.initial_agent_count);
  if (wanted > interior.size()) {
    throw WorldInitError("requested " + std::to_string(wanted) + " entities but only " +
                         std::to_string(interior.size()) + " free cells");
  }
  // Partial Fisher-Yates: the first `wanted` slots become a uniform sample.
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t j = i + rng.below(interior.size() - i);
    std::swap(interior[i], interior[j]);
  }

  std::size_t next = 0;
  auto place = [&](int n, auto&& fn) {
    for (int i = 0; i < n; ++i) fn(interior[next++]);
  };
  place(cfg.internal_wall_count, [&](std::size_t i) { w.cells[i].kind = CellKind::Wall; });
  place(cfg.initial_plant_count, [&](std::size_t i) { w.cells[i].kind = CellKind::Plant; });
  place(cfg.initial_tree_count, [&](std::size_t i) { w.cells[i].kind = CellKind::Tree; });
  place(cfg.initial_carnivore_count, [&](std::size_t i) {
    const EntityId id = w.next_carnivore_id++;
    w.cells[i] = Cell{CellKind::Carnivore, id, 0.0};
    w.carnivores.push_back({id, w.pos_of(i)});
  });
  place(cfg.initial_agent_count, [&](std::size_t i) {
    AgentState a;
    a.id = w.next_agent_id++;
    a.pos = w.pos_of(i);
    a.health = cfg.max_health;
    a.energy = cfg.max_energy;
    w.cells[i] = Cell{CellKind::Agent, a.id, 0.0};
    w.agents.push_back(std::move(a));
  });
  return w;
}

/// Places a newborn or test agent on an empty cell.
inline AgentState& add_agent(WorldState& w, Pos p, double energy, double health, Genome genome) {
  if (!w.in_bounds(p) || w.at(p).kind != CellKind::Empty) {
    throw ContractViolation("add_agent: target cell is not empty");
  }
  AgentState a;
  a.id = w.next_agent_id++;
  a.pos = p;
  a.energy = energy;
  a.health = health;
  a.born_at = w.t;
  a.birth_genome = genome;
  a.genome = std::move(genome);
  w.at(p) = Cell{CellKind::Agent, a.id, 0.0};
  w.agents.push_back(std::move(a));
  return w.agents.back();
}

inline CarnivoreState& add_carnivore(WorldState& w, Pos p) {
  if (!w.in_bounds(p) || w.at(p).kind != CellKind::Empty) {
    throw ContractViolation("add_carnivore: target cell is not empty");
  }
  const EntityId id = w.next_carnivore_id++;
  w.at(p) = Cell{CellKind::Carnivore, id, 0.0};
  w.carnivores.push_back({id, p});
  return w.carnivores.back();
}

/// Phase 1. A carnivore that sees an agent (Manhattan distance within
/// carnivore_view_dist; sheltered agents are invisible) steps toward the
/// nearest one, preferring the axis with the larger gap and breaking ties in
/// N, E, W, S order. Stepping onto an agent wounds it and the carnivore stays
/// put. With nothing in sight it steps to a uniformly chosen empty or corpse
/// neighbour. Plants, trees and walls block carnivores; corpses are eaten.
inline StepEvents move_carnivores(WorldState& w, RngStream& rng) {
  StepEvents ev;
  const int view = w.cfg.carnivore_view_dist;
  for (auto& k : w.carnivores) {
    const double u = rng.uniform();  // drawn every step to keep the stream aligned

    const AgentState* prey = nullptr;
    int best = view + 1;
    for (int dy = -view; dy <= view; ++dy) {
      const int span = view - std::abs(dy);
      for (int dx = -span; dx <= span; ++dx) {
        const Pos q{k.pos.x + dx, k.pos.y + dy};
        if ((dx == 0 && dy == 0) || !w.in_bounds(q)) continue;
        const Cell& c = w.at(q);
        if (c.kind != CellKind::Agent) continue;
        const int d = std::abs(dx) + std::abs(dy);
        const AgentState* a = w.find_agent(c.id);
        if (d < best || (d == best && prey && a->id < prey->id)) {
          best = d;
          prey = a;
        }
      }
    }

    std::array<Action, 4> options{};
    int n_options = 0;
    if (prey) {
      const int gx = prey->pos.x - k.pos.x;
      const int gy = prey->pos.y - k.pos.y;
      const Action horiz = gx > 0 ? Action::East : Action::West;
      const Action vert = gy > 0 ? Action::South : Action::North;
      if (gx != 0 && gy != 0) {
        const bool horiz_first = std::abs(gx) > std::abs(gy) ||
                                 (std::abs(gx) == std::abs(gy) && horiz < vert);
        options[0] = horiz_first ? horiz : vert;
        options[1] = horiz_first ? vert : horiz;
        n_options = 2;
      } else {
        options[0] = gx != 0 ? horiz : vert;
        n_options = 1;
      }
    } else {
      std::array<Action, 4> open{};
      int n_open = 0;
      for (Action a : kActions) {
        const Pos q = k.pos + offset_of(a);
        if (w.in_bounds(q) && detail::carnivore_passable(w.at(q).kind)) open[n_open++] = a;
      }
      if (n_open > 0) {
        options[0] = open[static_cast<std::size_t>(u * n_open)];
        n_options = 1;
      }
    }

    for (int i = 0; i < n_options; ++i) {
      const Pos q = k.pos + offset_of(options[static_cast<std::size_t>(i)]);
      if (!w.in_bounds(q)) continue;
      Cell& target = w.at(q);
      if (target.kind == CellKind::Agent) {
        AgentState* victim = w.find_agent(target.id);
        victim->health = std::max(0.0, victim->health - w.cfg.damage_carnivore);
        ev.add({w.t, EventKind::Attack, victim->id, victim->pos, "carnivore", k.id});
        detail::check_death(w, *victim, ev);
        break;
      }
      if (detail::carnivore_passable(target.kind)) {
        if (target.kind == CellKind::Corpse) {
          ev.add({w.t, EventKind::CorpseConsumed, k.id, q, "carnivore", kNoEntity});
        }
        w.at(k.pos) = Cell{};
        target = Cell{CellKind::Carnivore, k.id, 0.0};
        k.pos = q;
        break;
      }
    }
  }
  return ev;
}

/// Phase 2 for one agent. Every attempted action costs energy_cost_move; food
/// gain is applied (and capped) before that cost. Blocked moves cost
/// damage_wall health, except bumping another agent, which costs
/// damage_agent_collision. Nothing damages an agent inside a tree.
inline void resolve_agent_move(WorldState& w, AgentState& agent, Action action, StepEvents& ev) {
  if (!agent.alive) throw ContractViolation("resolve_agent_move: agent is dead");
  const SimConfig& cfg = w.cfg;
  const Pos from = agent.pos;
  const Pos to = from + offset_of(action);
  Cell& dst = w.at(to);  // boundary walls keep every neighbour in bounds

  auto eat = [&](double gain, std::string_view what) {
    agent.energy = std::min(agent.energy + gain, cfg.max_energy);
    ev.add({w.t, EventKind::Meal, agent.id, to, what, kNoEntity});
  };
  auto step_onto = [&] {
    const CellKind k = dst.kind;
    if (k == CellKind::Plant) eat(cfg.energy_gain_plant, "plant");
    if (k == CellKind::Corpse) eat(cfg.energy_gain_meat, "meat");
    if (agent.in_tree) {
      w.at(from).id = kNoEntity;
      agent.in_tree = false;
      ev.add({w.t, EventKind::LeaveTree, agent.id, to, "", kNoEntity});
    } else {
      w.at(from) = Cell{};
    }
    dst = Cell{CellKind::Agent, agent.id, 0.0};
    agent.pos = to;
  };

  switch (dst.kind) {
    case CellKind::Empty:
    case CellKind::Plant:
    case CellKind::Corpse:
      step_onto();
      break;
    case CellKind::Tree:
      if (!agent.in_tree && dst.id == kNoEntity) {
        w.at(from) = Cell{};
        dst.id = agent.id;
        agent.pos = to;
        agent.in_tree = true;
        ev.add({w.t, EventKind::EnterTree, agent.id, to, "", kNoEntity});
        break;
      }
      [[fallthrough]];
    case CellKind::Wall:
    case CellKind::Agent:
    case CellKind::Carnivore:
      if (!agent.in_tree) {
        const double damage = dst.kind == CellKind::Agent ? cfg.damage_agent_collision : cfg.damage_wall;
        agent.health = std::max(0.0, agent.health - damage);
        constexpr std::string_view names[] = {"empty", "wall", "plant", "tree",
                                              "carnivore", "agent", "corpse"};
        ev.add({w.t, EventKind::Collision, agent.id, from, names[static_cast<int>(dst.kind)], dst.id});
      }
      break;
  }
  agent.energy = std::max(0.0, agent.energy - cfg.energy_cost_move);
  detail::check_death(w, agent, ev);
}

/// Every empty cell independently sprouts with plant_growth_prob when the
/// number of plants among its 8 neighbours lies in
/// [plant_min_seed_neighbors, plant_max_density_neighbors]. With the default
/// minimum of 1 plants only spread from existing patches; 0 lets any empty
/// cell sprout.
/// Neighbour counts are taken before any cell sprouts in this call.
inline int grow_plants(WorldState& w, RngStream& rng) {
  std::vector<std::uint64_t> sprout;
  for_each_bernoulli_index(w.cells.size(), w.cfg.plant_growth_prob, rng, [&](std::uint64_t i) {
    if (w.cells[i].kind != CellKind::Empty) return;
    const int nb = detail::plant_neighbors(w, w.pos_of(i));
    if (nb > w.cfg.plant_max_density_neighbors || nb < w.cfg.plant_min_seed_neighbors) return;
    sprout.push_back(i);
  });
  for (auto i : sprout) w.cells[i].kind = CellKind::Plant;
  return static_cast<int>(sprout.size());
}

struct TreeChanges {
  int born = 0;
  int died = 0;
};

/// Unoccupied trees die with tree_death_prob, then empty cells become trees
/// with tree_birth_prob. Sheltering trees never die.
inline TreeChanges update_trees(WorldState& w, RngStream& rng) {
  TreeChanges out;
  for_each_bernoulli_index(w.cells.size(), w.cfg.tree_death_prob, rng, [&](std::uint64_t i) {
    Cell& c = w.cells[i];
    if (c.kind == CellKind::Tree && c.id == kNoEntity) {
      c = Cell{};
      ++out.died;
    }
  });
  for_each_bernoulli_index(w.cells.size(), w.cfg.tree_birth_prob, rng, [&](std::uint64_t i) {
    Cell& c = w.cells[i];
    if (c.kind == CellKind::Empty) {
      c.kind = CellKind::Tree;
      c.id = kNoEntity;
      ++out.born;
    }
  });
  return out;
}

inline int decay_corpses(WorldState& w) {
  int removed = 0;
  for (auto& c : w.cells) {
    if (c.kind != CellKind::Corpse) continue;
    c.meat -= w.cfg.corpse_decay_rate;
    if (detail::depleted(c.meat)) {
      c = Cell{};
      ++removed;
    }
  }
  return removed;
}

/// One carnivore on a uniformly chosen empty cell; no-op on a full grid.
/// Candidates are drawn by rejection first so that worlds differing only in
/// a few cells still tend to pick the same spot.
inline std::optional<CarnivoreState> spawn_carnivore(WorldState& w, RngStream& rng) {
  constexpr int kRejectionTries = 64;
  for (int i = 0; i < kRejectionTries; ++i) {
    const auto idx = rng.below(w.cells.size());
    if (w.cells[idx].kind == CellKind::Empty) return add_carnivore(w, w.pos_of(idx));
  }
  std::vector<std::size_t> empty;
  for (std::size_t i = 0; i < w.cells.size(); ++i) {
    if (w.cells[i].kind == CellKind::Empty) empty.push_back(i);
  }
  if (empty.empty()) return std::nullopt;
  return add_carnivore(w, w.pos_of(empty[rng.below(empty.size())]));
}

inline bool spawn_due(const WorldState& w) noexcept {
  const int freq = w.cfg.carnivore_spawn_freq;
  return freq > 0 && w.t > 0 && w.t % freq == 0;
}

/// Phase 4: every living agent outside a tree may reproduce once.
inline void reproduce_all(WorldState& w, RngStream& rng, const InheritFn& inherit, StepEvents& ev) {
  const std::size_t n = w.agents.size();
  std::vector<Pos> free_cells;
  for (std::size_t i = 0; i < n; ++i) {
    if (!w.agents[i].alive) continue;
    free_cells.clear();
    for (Action a : kActions) {
      const Pos q = w.agents[i].pos + offset_of(a);
      if (w.in_bounds(q) && w.at(q).kind == CellKind::Empty) free_cells.push_back(q);
    }
    auto birth = maybe_reproduce(w.agents[i], w.cfg, rng, free_cells, inherit);
    if (!birth) continue;
    w.agents[i].energy -= birth->parent_debit;
    const EntityId parent = w.agents[i].id;
    auto& child = add_agent(w, birth->cell, birth->child_energy, w.cfg.max_health, std::move(birth->genome));
    ev.add({w.t, EventKind::Birth, child.id, child.pos, "", parent});
    detail::check_death(w, w.agents[i], ev);
  }
}

inline const InheritFn& copy_parent_genome() {
  static const InheritFn fn = [](const AgentState& parent, RngStream&) { return parent.birth_genome; };
  return fn;
}

/// Advances the world by one step. `actions` must list every living agent
/// exactly once in ascending id order.
inline StepEvents step_world(WorldState& w, std::span<const AgentAction> actions, TrialStreams& streams,
                             const InheritFn& inherit = copy_parent_genome()) {
  {
    std::size_t j = 0;
    for (const auto& a : w.agents) {
      if (!a.alive) continue;
      if (j >= actions.size() || actions[j].agent != a.id) {
        throw ContractViolation("step_world: missing or out-of-order action for agent " + std::to_string(a.id));
      }
      ++j;
    }
    if (j != actions.size()) {
      throw ContractViolation("step_world: action supplied for dead or unknown agent " +
                              std::to_string(actions[j].agent));
    }
  }

  StepEvents ev = move_carnivores(w, streams.carnivores);

  std::size_t j = 0;
  for (auto& a : w.agents) {
    if (!a.alive) continue;
    while (actions[j].agent != a.id) ++j;  // skip agents killed in phase 1
    resolve_agent_move(w, a, actions[j].action, ev);
  }

  auto plants_rng = streams.env(w.t, TrialStreams::EnvPurpose::Plants);
  grow_plants(w, plants_rng);
  auto trees_rng = streams.env(w.t, TrialStreams::EnvPurpose::Trees);
  update_trees(w, trees_rng);
  decay_corpses(w);
  if (spawn_due(w)) {
    auto spawn_rng = streams.env(w.t, TrialStreams::EnvPurpose::Spawn);
    if (auto k = spawn_carnivore(w, spawn_rng)) {
      ev.add({w.t, EventKind::CarnivoreSpawn, k->id, k->pos, "", kNoEntity});
    }
  }

  reproduce_all(w, streams.mutation, inherit, ev);

  std::erase_if(w.agents, [](const AgentState& a) { return !a.alive; });
  ++w.t;
  return ev;
}

}  // namespace erl
