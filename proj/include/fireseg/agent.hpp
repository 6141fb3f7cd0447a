#pragma once

#include "fireseg/rough.hpp"

#include <cstdint>
#include <filesystem>
#include <map>

namespace fireseg {

struct AgentConfig {
    double gamma = 0.9;      // discount factor, [0,1)
    int quant_levels = 16;   // per-channel feature quantization, >= 2
    int lookahead_depth = 1; // successor-chain depth, >= 1
};

void validate(const AgentConfig& cfg);

/// Quantized granule descriptor. Granules mapping to the same key count as
/// the same agent state across frames, which is what lets a trained table
/// skip re-evaluation on later frames.
struct StateKey {
    std::array<std::uint16_t, 6> bins{};
    auto operator<=>(const StateKey&) const = default;
};

/// key(v) = floor(v * quant_levels) per channel, clamped to quant_levels-1.
StateKey quantize_state(const Feature& feature, int quant_levels);

enum class Action : std::uint8_t { exclude = 0, include = 1 };

struct QEntry {
    double q_include = 0.0;
    double q_exclude = 0.0;
    Action chosen = Action::exclude;
    std::uint64_t visits = 0;

    friend bool operator==(const QEntry&, const QEntry&) = default;
};

/// Persistent state -> action-value map. Grows monotonically; never forgets.
class QTable {
public:
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const QEntry* find(const StateKey& key) const;
    QEntry* find(const StateKey& key);
    void record(const StateKey& key, const QEntry& entry);

    const std::map<StateKey, QEntry>& entries() const { return entries_; }

    /// Versioned JSON serialization; entries come out key-sorted so repeated
    /// saves of the same table are byte-identical.
    void save(const std::filesystem::path& path, const AgentConfig& cfg) const;

    /// Rejects unknown versions and tables trained under a different
    /// quantization or discount than the current config.
    static QTable load(const std::filesystem::path& path, const AgentConfig& cfg);

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::map<StateKey, QEntry> entries_;
};

/// Running mean 6-channel feature of every pixel currently counted as fire;
/// the model M boundary granules are scored against.
struct FireModel {
    Feature mean_feature{};
    std::uint64_t pixel_count = 0;

    bool defined() const { return pixel_count > 0; }

    /// Fold a granule's pixels into the running mean.
    void absorb(const Granule& g);
};

/// R = 1 - 2 * D with D = ||model - granule||_2 / sqrt(6), so D is in [0,1]
/// and R in [-1,1]: +1 for identical features, -1 for maximal disagreement.
double reward(const FireModel& model, const Granule& g);

/// Read-only view of the walk state q_pair scores against. `candidate`
/// flags the still-undecided boundary granules; `lower_adjacent` flags
/// granules with at least one neighbor in the current fire set.
struct BoundaryWalkView {
    const std::vector<Granule>& granules;
    const AdjacencyList& adjacency;
    const std::vector<std::uint8_t>& candidate;
    const std::vector<std::uint8_t>& lower_adjacent;
};

struct QPair {
    double q_include = 0.0;
    double q_exclude = 0.0;
    double self_reward = 0.0;
};

/// Action values for one boundary granule:
///   q_a = R(g) + gamma * V(succ_a)    (q_a = R(g) when succ_a is absent)
/// where succ for the include action is the lowest-id candidate adjacent to
/// g, succ for the exclude action is the lowest-id candidate adjacent to the
/// current fire set, and V recurses the same rule for lookahead_depth levels
/// with the chain so far excluded from successor selection.
QPair q_pair(const BoundaryWalkView& view, int granule_id, const FireModel& model,
             const AgentConfig& cfg, std::uint64_t* reward_evals = nullptr);

struct RefineResult {
    std::vector<int> fire; // sorted granule ids, lower <= fire <= upper
    bool no_fire_model = false;
    std::uint64_t reward_evals = 0;
    std::uint64_t known_state_hits = 0;
};

/// The boundary walk: visit every boundary granule in BFS order from the
/// lower approximation (ascending id within a layer, unreachable ids last),
/// replay the stored action for known states, otherwise score with q_pair
/// and record the decision. Included granules join the fire set and update
/// the model immediately. An empty lower approximation yields an empty fire
/// set and an untouched table, flagged no_fire_model.
RefineResult refine(const GranulatedFrame& gf, const RoughApproximation& ra,
                    const AgentConfig& cfg, QTable& qt);

struct PipelineConfig {
    int thr = 30; // granulation color threshold
    AgentConfig agent;
};

struct FrameSegmentation {
    PixelMask mask;
    GranulatedFrame granulated;
    RoughApproximation approx;
    std::vector<int> fire_granules;
    bool no_fire_model = false;
    std::uint64_t reward_evals = 0;
    std::uint64_t known_state_hits = 0;
};

/// Full single-frame pipeline: rule masks -> granulation -> rough
/// approximation -> boundary refinement -> pixel mask.
FrameSegmentation segment_frame(const FrameBuffer& f, const PipelineConfig& cfg, QTable& qt);

} // namespace fireseg
