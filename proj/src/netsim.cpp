#include "scc5g/netsim.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "scc5g/errors.hpp"

namespace scc5g::netsim {

namespace {

// splitmix64; all simulator randomness flows through counter-keyed streams
// of this so that runs are reproducible and independent of event timing.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t x) {
  return static_cast<double>(mix64(x) >> 11) * 0x1.0p-53;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t domain, std::uint64_t a,
                         std::uint64_t b) {
  return mix64(seed ^ mix64(domain) ^ mix64(a * 0x100000001b3ull + b));
}

constexpr std::uint64_t kDomainMobility = 0x6d6f62;  // per-UE waypoint stream
constexpr std::uint64_t kDomainLoss = 0x6c6f73;      // per-(leg, attempt) loss draw
constexpr std::uint64_t kFrameBytes = 1024;
constexpr unsigned kLegs = 6;

struct Point {
  double x, y;
};

// Random-waypoint track, extended lazily and deterministically.
class UeTrack {
 public:
  UeTrack(std::uint64_t seed, unsigned ue, const MobilityConfig& cfg) : cfg_(cfg) {
    key_ = stream_key(seed, kDomainMobility, ue, 0);
    pos_ = draw_point();
    seg_start_t_ = 0;
    next_segment();
  }

  Point position(double t) {
    while (t > seg_end_t_) {
      pos_ = seg_target_;
      seg_start_t_ = seg_end_t_;
      next_segment();
    }
    const double span = seg_end_t_ - seg_start_t_;
    const double f = span > 0 ? (t - seg_start_t_) / span : 1.0;
    return {pos_.x + (seg_target_.x - pos_.x) * f, pos_.y + (seg_target_.y - pos_.y) * f};
  }

  double distance_to_center(double t) {
    const Point p = position(t);
    const double c = cfg_.area_m / 2;
    return std::hypot(p.x - c, p.y - c);
  }

 private:
  double draw() { return uniform01(key_ + counter_++ * 0x9e3779b9ull); }

  Point draw_point() { return {draw() * cfg_.area_m, draw() * cfg_.area_m}; }

  void next_segment() {
    seg_target_ = draw_point();
    double speed = cfg_.speed_min_mps + draw() * (cfg_.speed_max_mps - cfg_.speed_min_mps);
    speed = std::max(speed, 0.01);  // a stationary draw still finishes its segment
    const double dist = std::hypot(seg_target_.x - pos_.x, seg_target_.y - pos_.y);
    seg_end_t_ = seg_start_t_ + dist / speed;
  }

  MobilityConfig cfg_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  Point pos_{};
  Point seg_target_{};
  double seg_start_t_ = 0;
  double seg_end_t_ = 0;
};

// UEs whose radio segment a leg crosses; UE 0 initiates toward UE 1.
const std::vector<unsigned> kLegUes[kLegs] = {
    {0, 1},  // M1 initiator -> responder
    {1},     // M2 responder -> authority
    {1},     // M3 authority -> responder
    {1, 0},  // M4 responder -> initiator
    {0},     // M5 initiator -> authority
    {0},     // M6 authority -> initiator
};

bool leg_touches_hakf(unsigned leg) {
  return leg == 1 || leg == 2 || leg == 4 || leg == 5;
}

bool leg_arrives_at_hakf(unsigned leg) {
  return leg == 1 || leg == 4;
}

}  // namespace

void SimScenario::validate() const {
  if (n_ues < 2) throw Error(ErrorClass::InvalidArgument, "need at least two UEs");
  if (link.one_way_delay_s < 0 || hakf_extra_delay_s < 0 || endpoint_proc_s < 0 ||
      hakf_proc_s < 0 || warmup_s < 0 || retx.timeout_s < 0)
    throw Error(ErrorClass::InvalidArgument, "delays must be non-negative");
  if (link.capacity_bps <= 0) throw Error(ErrorClass::InvalidArgument, "capacity must be positive");
  if (mobility.area_m <= 0) throw Error(ErrorClass::InvalidArgument, "area must be positive");
  if (mobility.speed_min_mps < 0 || mobility.speed_max_mps < mobility.speed_min_mps)
    throw Error(ErrorClass::InvalidArgument, "bad speed range");
  if (retx.backoff < 1.0) throw Error(ErrorClass::InvalidArgument, "backoff must be >= 1");
}

double SimScenario::offered_load() const {
  if (!flows.enabled) return 0;
  const double per_ue = flows.voice_bps + flows.video_bps + flows.gaming_bps;
  return per_ue * n_ues / link.capacity_bps;
}

void EventQueue::schedule(double time, Handler fn) {
  assert(time >= now_ && "event scheduled in the past");
  heap_.push(Item{time, next_seq_++, std::move(fn)});
}

bool EventQueue::run_next() {
  if (heap_.empty()) return false;
  Item item = heap_.top();
  heap_.pop();
  assert(item.time >= now_ && "dispatch order violated");
  now_ = item.time;
  item.fn();
  return true;
}

void EventQueue::run_all() {
  while (run_next()) {
  }
}

double congestion_loss(double load, const LossModel& m) {
  if (m.fixed_loss >= 0) return std::min(m.fixed_loss, 1.0);
  if (load <= 0) return 0;
  double loss = load < m.knee_load ? m.knee_loss * load / m.knee_load
                                   : m.knee_loss + m.slope * (load - m.knee_load);
  return std::min(loss, m.max_loss);
}

double ue_distance_to_center(std::uint64_t seed, unsigned ue, double t,
                             const MobilityConfig& cfg) {
  UeTrack track(seed, ue, cfg);
  return track.distance_to_center(t);
}

SimMetrics run_once(const SimScenario& sc) {
  sc.validate();

  UeTrack initiator(sc.seed, 0, sc.mobility);
  UeTrack responder(sc.seed, 1, sc.mobility);
  UeTrack* tracks[2] = {&initiator, &responder};
  const double d_max = sc.mobility.area_m / 2 * std::sqrt(2.0);
  const double base_loss = congestion_loss(sc.offered_load(), sc.loss);
  const double rho = std::min(sc.offered_load(), sc.link.queue_rho_cap);
  const double queue_factor = 1.0 + sc.link.queue_weight * rho / (1.0 - rho);

  // Positions feeding the loss multiplier are sampled on the nominal
  // (load-independent) schedule of each attempt, so the same seed draws a
  // comparable loss sequence at every congestion level.
  auto loss_probability = [&](unsigned leg, unsigned attempt) {
    if (sc.loss.fixed_loss >= 0) return std::min(sc.loss.fixed_loss, 1.0);
    const double t_nom =
        sc.warmup_s + leg * sc.link.one_way_delay_s + attempt * sc.retx.timeout_s;
    double dist = 0;
    for (unsigned ue : kLegUes[leg]) dist += tracks[ue]->distance_to_center(t_nom);
    dist /= static_cast<double>(kLegUes[leg].size());
    const double p = base_loss * (1.0 + sc.loss.distance_weight * dist / d_max);
    return std::min(p, 0.99);
  };

  auto leg_delay = [&](unsigned leg) {
    double d = sc.link.one_way_delay_s * queue_factor;
    if (leg_touches_hakf(leg)) d += sc.hakf_extra_delay_s;
    return d;
  };

  EventQueue queue;
  SimMetrics metrics;
  double m1_send_time = -1;
  double initiator_established = -1;
  double responder_established = -1;
  bool failed = false;

  // Stop-and-wait chain over the six legs; a lost frame is detected by the
  // sender's timer and retransmitted with exponential backoff.
  std::function<void(unsigned, unsigned)> send_attempt = [&](unsigned leg, unsigned attempt) {
    if (failed) return;
    const double now = queue.now();
    if (leg == 0 && attempt == 0) m1_send_time = now;
    metrics.auth_traffic_bytes += kFrameBytes;
    if (attempt > 0) ++metrics.retransmissions;

    const double u = uniform01(stream_key(sc.seed, kDomainLoss, leg, attempt));
    if (u < loss_probability(leg, attempt)) {
      if (attempt >= sc.retx.max_retries) {
        failed = true;
        return;
      }
      const double wait = sc.retx.timeout_s * std::pow(sc.retx.backoff, attempt);
      queue.schedule(now + wait, [=]() { send_attempt(leg, attempt + 1); });
      return;
    }

    const double arrival = now + leg_delay(leg);
    queue.schedule(arrival, [&, leg]() {
      if (failed) return;
      const double proc = leg_arrives_at_hakf(leg) ? sc.hakf_proc_s : sc.endpoint_proc_s;
      const double ready = queue.now() + proc;
      if (leg == 2) {
        // Responder derives its key when it emits M4.
        queue.schedule(ready, [&]() {
          responder_established = queue.now();
          send_attempt(3, 0);
        });
      } else if (leg == 5) {
        queue.schedule(ready, [&]() { initiator_established = queue.now(); });
      } else {
        queue.schedule(ready, [&, leg]() { send_attempt(leg + 1, 0); });
      }
    });
  };

  // Handshake starts after warmup; the initiator pays its own processing
  // cost before the first frame leaves.
  queue.schedule(sc.warmup_s, [&]() {
    queue.schedule(sc.warmup_s + sc.endpoint_proc_s, [&]() { send_attempt(0, 0); });
  });
  queue.run_all();

  metrics.success = !failed && initiator_established >= 0 && responder_established >= 0;
  if (metrics.success)
    metrics.handshake_latency_s =
        std::max(initiator_established, responder_established) - m1_send_time;
  else
    metrics.handshake_latency_s = m1_send_time >= 0 ? queue.now() - m1_send_time : 0;
  return metrics;
}

SweepResult run_sweep(const SimScenario& base, unsigned n_min, unsigned n_max, unsigned n_step,
                      unsigned repeats) {
  if (repeats < 1) throw Error(ErrorClass::InvalidArgument, "repeats must be >= 1");
  if (n_step < 1 || n_min < 2 || n_max < n_min)
    throw Error(ErrorClass::InvalidArgument, "bad sweep range");
  SweepResult result;
  for (unsigned n = n_min; n <= n_max; n += n_step) {
    for (unsigned r = 0; r < repeats; ++r) {
      SimScenario sc = base;
      sc.n_ues = n;
      sc.seed = base.seed + r;
      result.rows.push_back(SweepRow{n, sc.seed, run_once(sc)});
    }
  }
  result.summary = summarize(result.rows);
  return result;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::map<unsigned, std::vector<const SweepRow*>> by_n;
  for (const SweepRow& r : rows) by_n[r.n_ues].push_back(&r);
  std::vector<SweepSummary> out;
  for (const auto& [n, group] : by_n) {
    SweepSummary s{n, 0, 0, 0};
    for (const SweepRow* r : group) {
      s.mean_latency_s += r->metrics.handshake_latency_s;
      s.mean_overhead_bytes += static_cast<double>(r->metrics.auth_traffic_bytes);
      s.success_rate += r->metrics.success ? 1.0 : 0.0;
    }
    const double count = static_cast<double>(group.size());
    s.mean_latency_s /= count;
    s.mean_overhead_bytes /= count;
    s.success_rate /= count;
    out.push_back(s);
  }
  return out;
}

const char kCsvHeader[] = "n_ues,seed,latency_s,overhead_bytes,retx,success";

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out.push_back('\n');
  char line[160];
  for (const SweepRow& r : rows) {
    std::snprintf(line, sizeof line, "%u,%llu,%.9f,%llu,%u,%d\n", r.n_ues,
                  static_cast<unsigned long long>(r.seed), r.metrics.handshake_latency_s,
                  static_cast<unsigned long long>(r.metrics.auth_traffic_bytes),
                  r.metrics.retransmissions, r.metrics.success ? 1 : 0);
    out += line;
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s, unsigned line_no) {
  try {
    return std::stod(std::string(s));
  } catch (const std::exception&) {
    throw Error(ErrorClass::ConfigError,
                "line " + std::to_string(line_no) + ": not a number: '" + std::string(s) + "'");
  }
}

std::uint64_t parse_u64(std::string_view s, unsigned line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorClass::ConfigError,
                "line " + std::to_string(line_no) + ": not an integer: '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<SweepRow> parse_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != kCsvHeader)
    throw Error(ErrorClass::CorruptEncoding, "missing or unexpected CSV header");
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6)
      throw Error(ErrorClass::CorruptEncoding, "CSV line " + std::to_string(i + 1) + ": bad field count");
    SweepRow r{};
    const unsigned line_no = static_cast<unsigned>(i + 1);
    r.n_ues = static_cast<unsigned>(parse_u64(fields[0], line_no));
    r.seed = parse_u64(fields[1], line_no);
    r.metrics.handshake_latency_s = parse_double(fields[2], line_no);
    r.metrics.auth_traffic_bytes = parse_u64(fields[3], line_no);
    r.metrics.retransmissions = static_cast<unsigned>(parse_u64(fields[4], line_no));
    r.metrics.success = parse_u64(fields[5], line_no) != 0;
    rows.push_back(r);
  }
  return rows;
}

ScenarioSpec parse_scenario_text(std::string_view text) {
  ScenarioSpec spec;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const unsigned line_no = static_cast<unsigned>(i + 1);
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorClass::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty())
      throw Error(ErrorClass::ConfigError, "line " + std::to_string(line_no) + ": empty value");

    SimScenario& b = spec.base;
    if (key == "n_ues") b.n_ues = static_cast<unsigned>(parse_u64(value, line_no));
    else if (key == "seed") b.seed = parse_u64(value, line_no);
    else if (key == "warmup_s") b.warmup_s = parse_double(value, line_no);
    else if (key == "area_m") b.mobility.area_m = parse_double(value, line_no);
    else if (key == "speed_min") b.mobility.speed_min_mps = parse_double(value, line_no);
    else if (key == "speed_max") b.mobility.speed_max_mps = parse_double(value, line_no);
    else if (key == "flows_enabled") b.flows.enabled = parse_u64(value, line_no) != 0;
    else if (key == "voice_rate_bps") b.flows.voice_bps = parse_double(value, line_no);
    else if (key == "video_rate_bps") b.flows.video_bps = parse_double(value, line_no);
    else if (key == "gaming_rate_bps") b.flows.gaming_bps = parse_double(value, line_no);
    else if (key == "one_way_delay_s") b.link.one_way_delay_s = parse_double(value, line_no);
    else if (key == "capacity_bps") b.link.capacity_bps = parse_double(value, line_no);
    else if (key == "queue_weight") b.link.queue_weight = parse_double(value, line_no);
    else if (key == "queue_rho_cap") b.link.queue_rho_cap = parse_double(value, line_no);
    else if (key == "knee_load") b.loss.knee_load = parse_double(value, line_no);
    else if (key == "knee_loss") b.loss.knee_loss = parse_double(value, line_no);
    else if (key == "loss_slope") b.loss.slope = parse_double(value, line_no);
    else if (key == "max_loss") b.loss.max_loss = parse_double(value, line_no);
    else if (key == "distance_loss_weight") b.loss.distance_weight = parse_double(value, line_no);
    else if (key == "fixed_loss") b.loss.fixed_loss = parse_double(value, line_no);
    else if (key == "hakf_extra_delay_s") b.hakf_extra_delay_s = parse_double(value, line_no);
    else if (key == "endpoint_proc_s") b.endpoint_proc_s = parse_double(value, line_no);
    else if (key == "hakf_proc_s") b.hakf_proc_s = parse_double(value, line_no);
    else if (key == "retx_timeout_s") b.retx.timeout_s = parse_double(value, line_no);
    else if (key == "retx_max") b.retx.max_retries = static_cast<unsigned>(parse_u64(value, line_no));
    else if (key == "retx_backoff") b.retx.backoff = parse_double(value, line_no);
    else if (key == "sweep") spec.sweep = parse_u64(value, line_no) != 0;
    else if (key == "n_min") spec.n_min = static_cast<unsigned>(parse_u64(value, line_no));
    else if (key == "n_max") spec.n_max = static_cast<unsigned>(parse_u64(value, line_no));
    else if (key == "n_step") spec.n_step = static_cast<unsigned>(parse_u64(value, line_no));
    else if (key == "repeats") spec.repeats = static_cast<unsigned>(parse_u64(value, line_no));
    else
      throw Error(ErrorClass::ConfigError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  spec.base.validate();
  return spec;
}

ScenarioSpec default_sweep_spec() {
  ScenarioSpec spec;
  spec.sweep = true;
  return spec;
}

}  // namespace scc5g::netsim
