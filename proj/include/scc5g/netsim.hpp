#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace scc5g::netsim {

struct FlowConfig {
  double voice_bps = 64'000;      // conversational voice, per UE
  double video_bps = 2'000'000;   // video streaming down, per UE
  double gaming_bps = 256'000;    // gaming up, per UE
  bool enabled = true;
};

struct LossModel {
  double knee_load = 0.8;  // loss ramps gently up to here...
  double knee_loss = 0.01;
  double slope = 0.5;  // ...and steeply past it
  double max_loss = 0.35;
  double distance_weight = 0.5;  // radio-leg multiplier from UE-to-base distance
  double fixed_loss = -1.0;      // >= 0 overrides the congestion model entirely
};

struct LinkConfig {
  double one_way_delay_s = 0.04;  // end-to-end, any single message
  double capacity_bps = 100e6;
  double queue_weight = 0.12;  // queueing delay factor strength
  double queue_rho_cap = 0.9;
};

struct RetxConfig {
  double timeout_s = 0.1;
  unsigned max_retries = 5;
  double backoff = 2.0;
};

struct MobilityConfig {
  double area_m = 500;  // square side; base station at the center
  double speed_min_mps = 0;
  double speed_max_mps = 20;
};

struct SimScenario {
  unsigned n_ues = 2;
  MobilityConfig mobility;
  FlowConfig flows;
  LinkConfig link;
  LossModel loss;
  double hakf_extra_delay_s = 0;  // home-network leg addition
  double endpoint_proc_s = 0.001;
  double hakf_proc_s = 0.005;
  RetxConfig retx;
  std::uint64_t seed = 1;
  double warmup_s = 0.1;

  void validate() const;  // throws Error{InvalidArgument}
  double offered_load() const;
};

struct SimMetrics {
  double handshake_latency_s = 0;
  std::uint64_t auth_traffic_bytes = 0;
  unsigned retransmissions = 0;
  bool success = false;
};

// Time-ordered dispatcher; ties dispatch in scheduling order. Dispatching
// asserts that time never runs backwards.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  void schedule(double time, Handler fn);
  bool run_next();  // false once empty
  void run_all();
  double now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }

 private:
  struct Item {
    double time;
    std::uint64_t seq;
    Handler fn;
    bool operator>(const Item& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0;
};

/// Piecewise-linear loss vs offered load: 0 at zero load, `knee_loss` at the
/// knee, rising at `slope` past it, capped at `max_loss`.
double congestion_loss(double load, const LossModel& m);

/// Distance of one UE from the base station at time t on its deterministic
/// random-waypoint track (exposed for observability).
double ue_distance_to_center(std::uint64_t seed, unsigned ue, double t, const MobilityConfig& cfg);

/// One simulated run: background load plus a single six-message handshake
/// with stop-and-wait retransmission. Deterministic in scenario.seed.
SimMetrics run_once(const SimScenario& scenario);

struct SweepRow {
  unsigned n_ues;
  std::uint64_t seed;
  SimMetrics metrics;
};

struct SweepSummary {
  unsigned n_ues;
  double mean_latency_s;
  double mean_overhead_bytes;
  double success_rate;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
};

SweepResult run_sweep(const SimScenario& base, unsigned n_min, unsigned n_max, unsigned n_step,
                      unsigned repeats);

// Scenario files are `key = value` text; parse errors carry line numbers.
struct ScenarioSpec {
  SimScenario base;
  bool sweep = false;
  unsigned n_min = 2, n_max = 40, n_step = 2;
  unsigned repeats = 100;
};

ScenarioSpec parse_scenario_text(std::string_view text);
ScenarioSpec default_sweep_spec();

extern const char kCsvHeader[];  // "n_ues,seed,latency_s,overhead_bytes,retx,success"
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(std::string_view text);
std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

}  // namespace scc5g::netsim
