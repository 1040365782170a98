#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "erlsim/config.hpp"
#include "erlsim/genome.hpp"
#include "erlsim/types.hpp"

namespace erl {

using EntityId = std::int64_t;
inline constexpr EntityId kNoEntity = -1;

/// Health or energy at or below this is treated as zero (absorbs the rounding
/// left by repeated 0.1 / 0.3 decrements).
inline constexpr double kDepletedEps = 1e-9;

enum class CellKind : std::uint8_t { Empty, Wall, Plant, Tree, Carnivore, Agent, Corpse };

/// One cell's content. `id` is the agent or carnivore id for those kinds and
/// the sheltered agent (or kNoEntity) for trees. `meat` is only used by corpses.
struct Cell {
  CellKind kind = CellKind::Empty;
  EntityId id = kNoEntity;
  double meat = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Pos {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pos&, const Pos&) = default;
  Pos operator+(Offset o) const noexcept { return {x + o.dx, y + o.dy}; }
};

inline int manhattan(Pos a, Pos b) noexcept { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

/// What an agent remembers between decisions for the temporal-difference signal.
struct LearnerState {
  bool has_prev = false;
  Observation prev_obs{};
  double prev_eval = 0.5;
  Action prev_action = Action::North;
  OutputBits prev_bits{};
};

struct AgentState {
  EntityId id = kNoEntity;
  Pos pos;
  double health = 1.0;
  double energy = 100.0;
  bool in_tree = false;
  bool alive = true;
  std::int64_t born_at = 0;
  Genome genome;        // current parameters, changed by lifetime learning
  Genome birth_genome;  // parameters received at birth; what offspring inherit
  LearnerState learner;
};

/// Carnivores have no energy or health; they hunt until the trial ends.
struct CarnivoreState {
  EntityId id = kNoEntity;
  Pos pos;
};

enum class EventKind : std::uint8_t {
  Death,
  Birth,
  Meal,
  Collision,
  Attack,
  EnterTree,
  LeaveTree,
  CarnivoreSpawn,
  CorpseConsumed,
};

inline constexpr std::string_view event_kind_name(EventKind k) noexcept {
  constexpr std::string_view names[] = {"death",     "birth",      "meal",
                                        "collision", "attack",     "enter_tree",
                                        "leave_tree", "carnivore_spawn", "corpse_consumed"};
  return names[static_cast<int>(k)];
}

struct Event {
  std::int64_t t = 0;
  EventKind kind = EventKind::Death;
  EntityId entity = kNoEntity;
  Pos pos;
  std::string_view detail;      // static text: cause, food type, obstacle...
  EntityId other = kNoEntity;   // attacker, parent, ...
};

struct StepEvents {
  std::vector<Event> events;
  int deaths = 0;
  int births = 0;

  void add(const Event& e) {
    if (e.kind == EventKind::Death) ++deaths;
    if (e.kind == EventKind::Birth) ++births;
    events.push_back(e);
  }
};

struct WorldState {
  SimConfig cfg;
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;                 // row-major, index y * width + x
  std::vector<AgentState> agents;          // ascending id
  std::vector<CarnivoreState> carnivores;  // ascending id
  std::int64_t t = 0;
  EntityId next_agent_id = 0;
  EntityId next_carnivore_id = 0;

  bool in_bounds(Pos p) const noexcept { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  std::size_t index(Pos p) const noexcept {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p.x);
  }
  Pos pos_of(std::size_t i) const noexcept {
    return {static_cast<int>(i % static_cast<std::size_t>(width)),
            static_cast<int>(i / static_cast<std::size_t>(width))};
  }
  Cell& at(Pos p) noexcept { return cells[index(p)]; }
  const Cell& at(Pos p) const noexcept { return cells[index(p)]; }

  std::size_t living_agents() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(agents.begin(), agents.end(), [](const AgentState& a) { return a.alive; }));
  }

  AgentState* find_agent(EntityId id) noexcept {
    auto it = std::lower_bound(agents.begin(), agents.end(), id,
                               [](const AgentState& a, EntityId v) { return a.id < v; });
    return (it != agents.end() && it->id == id) ? &*it : nullptr;
  }

  std::size_t count(CellKind k) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [k](const Cell& c) { return c.kind == k; }));
  }
};

/// Checks grid/registry consistency and state bounds. Returns a list of
/// problems, empty when the world is coherent.
inline std::vector<std::string> audit_world(const WorldState& w) {
  std::vector<std::string> bad;
  auto complain = [&](std::string s) { bad.push_back(std::move(s)); };
  if (w.cells.size() != static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height)) {
    complain("grid size mismatch");
    return bad;
  }
  for (int x = 0; x < w.width; ++x) {
    for (int y : {0, w.height - 1}) {
      if (w.at({x, y}).kind != CellKind::Wall) complain("boundary cell not wall");
    }
  }
  for (int y = 0; y < w.height; ++y) {
    for (int x : {0, w.width - 1}) {
      if (w.at({x, y}).kind != CellKind::Wall) complain("boundary cell not wall");
    }
  }

  std::size_t agent_cells = 0, carnivore_cells = 0, sheltered = 0;
  for (std::size_t i = 0; i < w.cells.size(); ++i) {
    const Cell& c = w.cells[i];
    if (c.kind == CellKind::Corpse && !(c.meat > 0.0)) complain("corpse with no meat");
    if (c.kind == CellKind::Agent) ++agent_cells;
    if (c.kind == CellKind::Carnivore) ++carnivore_cells;
    if (c.kind == CellKind::Tree && c.id != kNoEntity) ++sheltered;
  }

  std::size_t living = 0;
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    const auto& a = w.agents[i];
    if (i > 0 && w.agents[i - 1].id >= a.id) complain("agent registry not sorted");
    if (!a.alive) continue;
    ++living;
    if (!w.in_bounds(a.pos)) {
      complain("agent out of bounds");
      continue;
    }
    const Cell& c = w.at(a.pos);
    const CellKind want = a.in_tree ? CellKind::Tree : CellKind::Agent;
    if (c.kind != want || c.id != a.id) complain("agent " + std::to_string(a.id) + " not on its cell");
    if (!(a.energy > 0.0 && a.energy <= w.cfg.max_energy)) complain("agent energy out of range");
    if (!(a.health > 0.0 && a.health <= w.cfg.max_health)) complain("agent health out of range");
  }
  if (living != agent_cells + sheltered) complain("agent count differs between grid and registry");

  for (std::size_t i = 0; i < w.carnivores.size(); ++i) {
    const auto& k = w.carnivores[i];
    if (i > 0 && w.carnivores[i - 1].id >= k.id) complain("carnivore registry not sorted");
    if (!w.in_bounds(k.pos) || w.at(k.pos).kind != CellKind::Carnivore || w.at(k.pos).id != k.id) {
      complain("carnivore " + std::to_string(k.id) + " not on its cell");
    }
  }
  if (w.carnivores.size() != carnivore_cells) complain("carnivore count differs between grid and registry");
  return bad;
}

}  // namespace erl
