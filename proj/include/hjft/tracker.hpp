#pragma once

// Front tracking for p_t + H(p, a(x), g(t))_x = 0 with piecewise-constant a,
// g and p0: an event loop over front collisions and restarts at the jumps of
// g, with the Temple and Glimm monitors. Every front trajectory is kept in a
// log from which p, the flux trace at a point, and monitor series are read.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hjft/coeffs.hpp"
#include "hjft/errors.hpp"
#include "hjft/grid.hpp"
#include "hjft/riemann.hpp"

namespace hjft {

struct SideState {
  double p = 0.0;
  double h = 0.0;  // H(p, a, g) on the interval where the state lives
  double a = 0.0;
};

/// Trajectory of one front: alive on [birth, death), at x0 + speed (t - birth).
struct FrontRecord {
  double x0 = 0.0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
  double speed = 0.0;
  WaveKind kind = WaveKind::p_wave;
  SideState left;
  SideState right;
  std::size_t interval = 0;  // index of the g-interval it was born in
  std::uint64_t seq = 0;

  double position(double t) const { return x0 + speed * (t - birth); }
  bool alive(double t) const { return birth <= t && t < death; }
};

enum class EventType { collision, g_jump };

struct EventRecord {
  double t = 0.0;
  EventType type = EventType::collision;
  double x = 0.0;
  std::size_t fronts_in = 0;
  std::size_t fronts_out = 0;
  double T = 0.0;
  double Q = 0.0;
  double G = 0.0;
};

struct MonitorSample {
  double t = 0.0;
  double T = 0.0;
  double Q = 0.0;
  double G = 0.0;
  double C = 0.0;
  double Tz = 0.0;  // the same functional measured in the (z, alpha) plane
  double Gz = 0.0;
  std::size_t interval = 0;
  bool after_g_jump = false;  // first sample of a new g-interval
};

/// p^delta(., t) as a step function: states[i] lives on (x[i-1], x[i]).
struct Profile {
  std::vector<double> x;
  std::vector<SideState> states;

  const SideState& at(double s) const {
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    return states[static_cast<std::size_t>(it - x.begin())];
  }

  double p(double s) const { return at(s).p; }

  /// Exact integral of p over [s0, s1] (signed for s1 < s0).
  double integral(double s0, double s1) const {
    if (s1 < s0) return -integral(s1, s0);
    double sum = 0.0;
    double from = s0;
    auto it = std::upper_bound(x.begin(), x.end(), s0);
    for (auto k = static_cast<std::size_t>(it - x.begin()); k < x.size() && x[k] < s1; ++k) {
      sum += states[k].p * (x[k] - from);
      from = x[k];
    }
    sum += at(from).p * (s1 - from);
    return sum;
  }
};

struct TrackerLog {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double horizon = 1.0;
  std::vector<FrontRecord> fronts;
  std::vector<std::pair<double, SideState>> far_left;  // (from time, state)
  std::vector<EventRecord> events;
  std::vector<MonitorSample> monitors;
  std::vector<double> interval_start;  // t^n
  std::vector<double> interval_g;      // g on I^n
  std::vector<double> caps;            // P used on I^n
  std::vector<double> pbar;            // bound recursion
  std::vector<std::shared_ptr<const FluxGrid>> grids;
  std::vector<std::string> notes;
  double glimm_c = 0.0;
  double temple_bound = 0.0;  // a-priori bound on T over the run

  std::size_t interval_at(double t) const {
    const auto it = std::upper_bound(interval_start.begin(), interval_start.end(), t);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - interval_start.begin()) - 1));
  }

  SideState far_left_at(double t) const {
    SideState s = far_left.front().second;
    for (const auto& [from, st] : far_left) {
      if (from <= t) s = st;
    }
    return s;
  }

  Profile profile(double t) const {
    if (!(t >= 0.0 && t <= horizon)) {
      std::ostringstream os;
      os << "sample: t=" << t << " outside [0, " << horizon << "]";
      throw InputError(os.str());
    }
    std::vector<const FrontRecord*> alive;
    for (const auto& f : fronts) {
      if (f.alive(t)) alive.push_back(&f);
    }
    std::sort(alive.begin(), alive.end(), [t](const FrontRecord* a, const FrontRecord* b) {
      const double xa = a->position(t);
      const double xb = b->position(t);
      if (std::abs(xa - xb) > 1e-9) return xa < xb;
      return a->seq < b->seq;
    });
    Profile pr;
    pr.states.push_back(far_left_at(t));
    for (const auto* f : alive) {
      pr.x.push_back(f->position(t));
      pr.states.push_back(f->right);
    }
    // Coincident fronts keep their fan order; make positions non-decreasing.
    for (std::size_t i = 1; i < pr.x.size(); ++i) pr.x[i] = std::max(pr.x[i], pr.x[i - 1]);
    return pr;
  }

  std::vector<double> sample(double t, const std::vector<double>& xs) const {
    const auto pr = profile(t);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(pr.p(x));
    return out;
  }

  struct FluxPiece {
    double t0;
    double t1;
    double h;
  };

  /// H^delta(p^delta(x0, s), a(x0), g(s)) on [0, up_to] as constant pieces.
  std::vector<FluxPiece> flux_trace(double x0, double up_to) const {
    if (!(up_to >= 0.0 && up_to <= horizon)) throw InputError("flux_trace: time outside the run");
    std::vector<double> ts{0.0, up_to};
    for (const auto& f : fronts) {
      if (f.birth < up_to) ts.push_back(f.birth);
      if (f.death < up_to) ts.push_back(f.death);
      if (f.speed != 0.0) {
        const double tc = f.birth + (x0 - f.x0) / f.speed;
        if (tc > f.birth && tc < f.death && tc < up_to) ts.push_back(tc);
      }
    }
    for (double s : interval_start) {
      if (s < up_to) ts.push_back(s);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<FluxPiece> out;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      if (ts[i + 1] - ts[i] <= 0.0) continue;
      const double h = profile(0.5 * (ts[i] + ts[i + 1])).at(x0).h;
      if (!out.empty() && out.back().h == h) {
        out.back().t1 = ts[i + 1];
      } else {
        out.push_back({ts[i], ts[i + 1], h});
      }
    }
    return out;
  }

  double flux_integral(double x0, double up_to) const {
    double s = 0.0;
    for (const auto& pc : flux_trace(x0, up_to)) s += pc.h * (pc.t1 - pc.t0);
    return s;
  }

  void write_events(std::ostream& os) const {
    os << "# time type position fronts_in fronts_out T Q G\n" << std::setprecision(17);
    for (const auto& e : events) {
      os << e.t << ' ' << (e.type == EventType::collision ? "collide" : "g-jump") << ' ' << e.x << ' '
         << e.fronts_in << ' ' << e.fronts_out << ' ' << e.T << ' ' << e.Q << ' ' << e.G << '\n';
    }
  }

  void write_monitors(std::ostream& os) const {
    os << "# t T Q G Tz Gz\n" << std::setprecision(17);
    for (const auto& m : monitors) {
      os << m.t << ' ' << m.T << ' ' << m.Q << ' ' << m.G << ' ' << m.Tz << ' ' << m.Gz << '\n';
    }
  }

  void write_snapshot(std::ostream& os, double t, const std::vector<double>& xs) const {
    const auto pr = profile(t);
    os << "# x p\n" << std::setprecision(17);
    for (double x : xs) os << x << ' ' << pr.p(x) << '\n';
  }

  /// Smallest C keeping T + C T |g|_BV(t, horizon] non-increasing at every
  /// recorded event; infinity if none does.
  double min_glimm_c(bool z_plane = false) const {
    double need = 0.0;
    for (std::size_t i = 1; i < monitors.size(); ++i) {
      const auto& a = monitors[i - 1];
      const auto& b = monitors[i];
      // Q = T B, so G = T (1 + C B).
      const double Ba = a.T > 0.0 ? a.Q / a.T : 0.0;
      const double Bb = b.T > 0.0 ? b.Q / b.T : 0.0;
      const double Ta = z_plane ? a.Tz : a.T;
      const double Tb = z_plane ? b.Tz : b.T;
      const double rise = Tb - Ta;
      const double denom = Ta * Ba - Tb * Bb;
      if (rise <= 1e-10) continue;
      if (denom <= 0.0) return std::numeric_limits<double>::infinity();
      need = std::max(need, (rise - 1e-10) / denom);
    }
    return need;
  }
};

/// Inputs of one tracking run.
struct TrackerProblem {
  HamiltonianModel model = HamiltonianModel::offset_eikonal({1.0, 1.0, 1.0, 1.0});
  PiecewiseConstantFn a;   // on [x_lo, x_hi]
  PiecewiseConstantFn g;   // on [0, horizon]
  PiecewiseConstantFn p0;  // on [x_lo, x_hi]
  double delta = 0.1;
  double horizon = 1.0;
  std::optional<double> glimm_c;
  std::vector<double> extra_p;  // additional grid data (shared grids for paired runs)
  double min_cap = 0.0;         // floor for the initial cap P
  std::size_t fuse = 10'000'000;
};

/// Temple weight of a single wave.
inline double temple_weight(const HamiltonianModel& m, const SideState& l, const SideState& r, WaveKind kind,
                            double g) {
  const double pl = psi(m, l.p, l.a, g);
  const double pr = psi(m, r.p, r.a, g);
  if (kind == WaveKind::p_wave) return std::abs(pr - pl);
  const double da = std::abs(r.a - l.a);
  return (pr <= pl ? 2.0 : 4.0) * da * g;
}

/// Temple weight in the (z, alpha) plane: |dz| for p-waves, and 2|d alpha|
/// or 4|d alpha| for coefficient waves with the branch taken the other way
/// round (2 when Psi_r >= Psi_l).
inline double temple_weight_z(const HamiltonianModel& m, const SideState& l, const SideState& r, WaveKind kind,
                              double g) {
  if (kind == WaveKind::p_wave) return std::abs(z_transform(m, r.p, r.a, g) - z_transform(m, l.p, l.a, g));
  const double dal = std::abs(m.peak(r.a, g) - m.peak(l.a, g));
  return (psi(m, r.p, r.a, g) >= psi(m, l.p, l.a, g) ? 2.0 : 4.0) * dal;
}

/// Largest sampled ratio (|dPsi(g+)| - |dPsi(g-)|) / (|g+ - g-| |dPsi(g-)|)
/// over random states and coefficients in the model box.
inline double interaction_ratio(const HamiltonianModel& m, std::uint64_t seed, std::size_t samples,
                                double p_limit = 3.0) {
  std::mt19937_64 rng(seed);
  const auto& b = m.box();
  std::uniform_real_distribution<double> pd(-p_limit, p_limit);
  std::uniform_real_distribution<double> ad(b.a_min, b.a_max);
  std::uniform_real_distribution<double> gd(b.g_min, b.g_max);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double pl = pd(rng);
    const double pr = pd(rng);
    const double a = ad(rng);
    const double gm = gd(rng);
    const double gp = gd(rng);
    const double before = std::abs(psi(m, pr, a, gm) - psi(m, pl, a, gm));
    const double after = std::abs(psi(m, pr, a, gp) - psi(m, pl, a, gp));
    const double dg = std::abs(gp - gm);
    if (before <= 1e-12 || dg <= 1e-12) continue;
    worst = std::max(worst, (after - before) / (dg * before));
  }
  return worst;
}

/// Default Glimm constant: twice the larger of the sampled interaction ratio
/// and the relative growth 1/g_min of the coefficient-wave weights.
inline double calibrated_glimm_c(const HamiltonianModel& m) {
  const double g_min = std::max(m.box().g_min, 1e-12);
  return 2.0 * std::max(interaction_ratio(m, 0x5eed, 4000), 1.0 / g_min);
}

struct TrackerEvent {
  enum Type { collision, g_jump, horizon } type = horizon;
  double t = 0.0;
  double x = 0.0;
  std::size_t first = 0;  // cluster [first, last] of the active front list
  std::size_t last = 0;
};

class Tracker {
 public:
  static constexpr double cluster_dt = 1e-11;
  static constexpr double cluster_dx = 1e-9;

  explicit Tracker(TrackerProblem pb) : pb_(std::move(pb)) {
    if (!(pb_.delta > 0.0)) throw InputError("tracker: delta must be positive");
    if (!(pb_.horizon > 0.0)) throw InputError("tracker: horizon must be positive");
    log_.x_lo = pb_.a.lo();
    log_.x_hi = pb_.a.hi();
    log_.horizon = pb_.horizon;
    log_.glimm_c = pb_.glimm_c ? *pb_.glimm_c : calibrated_glimm_c(pb_.model);
    const auto& box = pb_.model.box();
    for (double v : pb_.a.values()) {
      if (!box.contains(v, box.g_min)) throw DomainError("tracker: a value outside the model box");
    }
    for (double v : pb_.g.values()) {
      if (!box.contains(box.a_min, v)) throw DomainError("tracker: g value outside the model box");
    }
    init();
  }

  double time() const { return t_; }
  bool done() const { return done_; }
  const TrackerLog& log() const { return log_; }
  TrackerLog take_log() { return std::move(log_); }
  const FluxGrid& grid() const { return *grid_; }
  std::size_t active_front_count() const { return fronts_.size(); }
  std::size_t event_count() const { return events_; }
  double cap() const { return cap_; }

  /// States left to right at the current time.
  std::vector<SideState> current_states() const {
    std::vector<SideState> out{side(left_)};
    for (const auto& f : fronts_) out.push_back(side(f.right));
    return out;
  }

  /// States of a companion run, merged into the next regrid so both runs
  /// keep one grid.
  void share_states(std::vector<SideState> states) { shared_ = std::move(states); }

  /// Active fronts as records (position at the current time in x0).
  std::vector<FrontRecord> active_fronts() const {
    std::vector<FrontRecord> out;
    for (const auto& f : fronts_) {
      auto r = log_.fronts[f.rec];
      r.x0 = r.position(t_);
      r.birth = t_;
      out.push_back(r);
    }
    return out;
  }

  double temple() const {
    double T = 0.0;
    for (const auto& f : fronts_) {
      T += temple_weight(pb_.model, side(f.left), side(f.right), f.kind, grid_->g());
    }
    return T;
  }

  /// Monitor values at the current time; `before_jump` counts a g-jump at
  /// the current time as still ahead.
  double temple_z() const {
    double T = 0.0;
    for (const auto& f : fronts_) {
      T += temple_weight_z(pb_.model, side(f.left), side(f.right), f.kind, grid_->g());
    }
    return T;
  }

  MonitorSample glimm(bool before_jump = false) const {
    MonitorSample m;
    m.t = t_;
    m.T = temple();
    m.Tz = temple_z();
    double bv = pb_.g.variation_on(t_, pb_.horizon);
    if (before_jump) bv += std::abs(pb_.g(t_) - pb_.g.left_limit(t_));
    m.Q = m.T * bv;
    m.C = log_.glimm_c;
    m.G = m.T + m.C * m.Q;
    m.Gz = m.Tz * (1.0 + m.C * bv);
    m.interval = n_;
    return m;
  }

  TrackerEvent next_event() const {
    TrackerEvent ev;
    ev.type = TrackerEvent::horizon;
    ev.t = pb_.horizon;
    const double tg = next_g_jump();
    if (tg < ev.t) {
      ev.type = TrackerEvent::g_jump;
      ev.t = tg;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t i = 0; i + 1 < fronts_.size(); ++i) {
      const double ds = fronts_[i].speed - fronts_[i + 1].speed;
      if (ds <= 0.0) continue;
      const double gap = fronts_[i + 1].position(t_) - fronts_[i].position(t_);
      const double tc = t_ + std::max(0.0, gap / ds);
      if (tc < best) {
        best = tc;
        bi = i;
      }
    }
    const bool collide = best < pb_.horizon && (ev.type != TrackerEvent::g_jump || best <= tg);
    if (!collide) return ev;
    ev.type = TrackerEvent::collision;
    ev.t = best;
    ev.x = 0.5 * (fronts_[bi].position(best) + fronts_[bi + 1].position(best));
    std::size_t lo = bi;
    std::size_t hi = bi + 1;
    while (lo > 0 && std::abs(fronts_[lo - 1].position(best) - ev.x) <= cluster_dx) --lo;
    while (hi + 1 < fronts_.size() && std::abs(fronts_[hi + 1].position(best) - ev.x) <= cluster_dx) ++hi;
    ev.first = lo;
    ev.last = hi;
    for (std::size_t i = lo; i <= hi; ++i) {
      if (fronts_[i].kind == WaveKind::a_wave) ev.x = fronts_[i].x0;
    }
    return ev;
  }

  void step() {
    if (done_) return;
    const auto ev = next_event();
    if (++events_ > pb_.fuse) {
      std::ostringstream os;
      os << "tracker: event fuse (" << pb_.fuse << ") exceeded at t=" << t_ << " with " << fronts_.size()
         << " fronts";
      throw SolverError(os.str());
    }
    switch (ev.type) {
      case TrackerEvent::horizon:
        t_ = pb_.horizon;
        done_ = true;
        --events_;
        return;
      case TrackerEvent::collision:
        collide(ev);
        return;
      case TrackerEvent::g_jump:
        restart(ev.t);
        return;
    }
  }

  const TrackerLog& run() {
    while (!done_) step();
    return log_;
  }

 private:
  struct Front {
    double x0;
    double t0;
    double speed;
    WaveKind kind;
    State left;
    State right;
    std::size_t rec;

    double position(double t) const { return x0 + speed * (t - t0); }
  };

  SideState side(State s) const {
    const auto& lv = grid_->level(s.level);
    return {lv.p[s.index], lv.h[s.index], lv.a};
  }

  double next_g_jump() const {
    for (double b : pb_.g.breaks()) {
      if (b > t_ && b < pb_.horizon) return b;
    }
    return std::numeric_limits<double>::infinity();
  }

  // G+ with a missing preimage capped at p = 0 (and noted).
  double g_plus(double h, double a, double g) {
    try {
      return pb_.model.inverse(h, a, g, Branch::plus);
    } catch (const NoPreimageError&) {
      log_.notes.push_back("flux above the peak of the largest level; bound capped at p = 0");
      return 0.0;
    } catch (const RangeError&) {
      return *pb_.model.p_guard();
    }
  }

  State locate(double p, double a) const {
    const std::size_t j = grid_->level_of(a);
    if (auto k = grid_->find_index(j, p, 1e-12)) return {j, *k};
    return {j, grid_->project(j, p)};
  }

  std::vector<Front> emit(const WaveFan& fan, double x, double t) {
    std::vector<Front> out;
    for (const auto& w : fan.waves) {
      if (w.left == w.right) continue;
      FrontRecord r;
      r.x0 = x;
      r.birth = t;
      r.speed = w.kind == WaveKind::a_wave ? 0.0 : w.speed;
      r.kind = w.kind;
      r.left = side(w.left);
      r.right = side(w.right);
      r.interval = n_;
      r.seq = seq_++;
      log_.fronts.push_back(r);
      out.push_back({x, t, r.speed, w.kind, w.left, w.right, log_.fronts.size() - 1});
    }
    return out;
  }

  WaveFan solve_between(State l, State r, bool interface, double x) const {
    try {
      if (interface) return solve_interface(*grid_, l.level, r.level, l.index, r.index);
      if (l.level != r.level) throw SolverError("tracker: level change without a coefficient front");
      return solve_scalar(*grid_, l.level, l.index, r.index);
    } catch (const UnsolvableError& e) {
      std::ostringstream os;
      os << e.what() << " (at x=" << x << ", t=" << t_ << ")";
      throw UnsolvableError(os.str());
    }
  }

  double inf_flux(const std::vector<SideState>& states, double g) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : states) m = std::min(m, pb_.model.eval(s.p, s.a, g));
    return m;
  }

  void record_sample(bool after_jump, bool before_jump = false) {
    auto s = glimm(before_jump);
    s.after_g_jump = after_jump;
    log_.monitors.push_back(s);
  }

  void init() {
    const double g0 = pb_.g(0.0);
    const double a_max = pb_.a.max_value();
    // Break points of the initial data.
    std::vector<double> xs = pb_.a.breaks();
    xs.insert(xs.end(), pb_.p0.breaks().begin(), pb_.p0.breaks().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<SideState> init_states;
    auto sample_state = [&](double x, bool left) {
      const double a = left ? pb_.a.left_limit(x) : pb_.a(x);
      const double p = left ? pb_.p0.left_limit(x) : pb_.p0(x);
      return SideState{p, pb_.model.eval(p, a, g0), a};
    };
    init_states.push_back(sample_state(pb_.a.lo(), false));
    for (double x : xs) init_states.push_back(sample_state(x, false));

    const double hinf = inf_flux(init_states, g0);
    double pmax = 0.0;
    for (const auto& s : init_states) pmax = std::max(pmax, std::abs(s.p));
    for (double p : pb_.extra_p) pmax = std::max(pmax, std::abs(p));
    cap_ = std::max({g_plus(hinf, a_max, g0), pmax, pb_.min_cap});
    if (pb_.model.p_guard()) cap_ = std::min(cap_, *pb_.model.p_guard());
    log_.pbar.push_back(g_plus(hinf, a_max, g0));

    std::vector<double> avals = pb_.a.distinct_values();
    std::vector<double> pdata{0.0};
    for (const auto& s : init_states) pdata.push_back(s.p);
    pdata.insert(pdata.end(), pb_.extra_p.begin(), pb_.extra_p.end());
    grid_ = std::make_shared<const FluxGrid>(FluxGrid::build(pb_.model, pb_.delta, avals, g0, pdata, cap_));
    log_.grids.push_back(grid_);
    log_.interval_start.push_back(0.0);
    log_.interval_g.push_back(g0);
    log_.caps.push_back(cap_);

    left_ = locate(init_states.front().p, init_states.front().a);
    log_.far_left.emplace_back(0.0, side(left_));
    State cur = left_;
    for (double x : xs) {
      const auto rs = sample_state(x, false);
      const State next = locate(rs.p, rs.a);
      const bool interface = cur.level != next.level;
      const auto fan = solve_between(cur, next, interface, x);
      for (auto& f : emit(fan, x, 0.0)) fronts_.push_back(f);
      cur = next;
    }
    log_.temple_bound = temple_bound(init_states, g0);
    record_sample(false);
  }

  // (|Psi(p0, a, g(0))|_BV + 4 |a|_BV g(0)) exp(|g|_BV)
  double temple_bound(const std::vector<SideState>& init_states, double g0) const {
    double v = 0.0;
    for (std::size_t i = 1; i < init_states.size(); ++i) {
      const auto& l = init_states[i - 1];
      const auto& r = init_states[i];
      v += std::abs(psi(pb_.model, r.p, r.a, g0) - psi(pb_.model, l.p, l.a, g0));
    }
    return (v + 4.0 * pb_.a.variation() * g0) * std::exp(pb_.g.variation_on(0.0, pb_.horizon));
  }

  void collide(const TrackerEvent& ev) {
    t_ = ev.t;
    bool interface = false;
    std::size_t a_count = 0;
    for (std::size_t i = ev.first; i <= ev.last; ++i) {
      if (fronts_[i].kind == WaveKind::a_wave) {
        interface = true;
        ++a_count;
      }
    }
    if (a_count > 1) throw SolverError("tracker: two coefficient fronts in one collision cluster");
    const State l = fronts_[ev.first].left;
    const State r = fronts_[ev.last].right;
    const auto fan = solve_between(l, r, interface, ev.x);
    const std::size_t in = ev.last - ev.first + 1;
    for (std::size_t i = ev.first; i <= ev.last; ++i) log_.fronts[fronts_[i].rec].death = t_;
    auto out = emit(fan, ev.x, t_);
    fronts_.erase(fronts_.begin() + static_cast<std::ptrdiff_t>(ev.first),
                  fronts_.begin() + static_cast<std::ptrdiff_t>(ev.last + 1));
    fronts_.insert(fronts_.begin() + static_cast<std::ptrdiff_t>(ev.first), out.begin(), out.end());
    record_sample(false);
    const auto& m = log_.monitors.back();
    log_.events.push_back({t_, EventType::collision, ev.x, in, out.size(), m.T, m.Q, m.G});
  }

  void restart(double tg) {
    t_ = tg;
    record_sample(false, true);
    const double g_new = pb_.g(tg);
    ++n_;

    // Current states, left to right.
    std::vector<SideState> states{side(left_)};
    for (const auto& f : fronts_) states.push_back(side(f.right));
    std::vector<double> ps;
    for (const auto& s : states) ps.push_back(s.p);
    auto all = states;
    for (const auto& s : shared_) {
      ps.push_back(s.p);
      all.push_back(s);
    }
    shared_.clear();

    const double a_max = pb_.a.max_value();
    const double a_min = pb_.a.min_value();
    const double pn = g_plus(inf_flux(all, g_new), a_max, g_new);
    cap_ = std::max(cap_, pn);
    if (pb_.model.p_guard()) cap_ = std::min(cap_, *pb_.model.p_guard());
    double h_prev = pb_.model.eval(log_.pbar.back(), a_min, g_new);
    log_.pbar.push_back(g_plus(h_prev, a_max, g_new));

    grid_ = std::make_shared<const FluxGrid>(grid_->regrid_for_g(g_new, ps, cap_));
    log_.grids.push_back(grid_);
    log_.interval_start.push_back(tg);
    log_.interval_g.push_back(g_new);
    log_.caps.push_back(cap_);

    left_ = locate(states.front().p, states.front().a);
    log_.far_left.emplace_back(tg, side(left_));

    // Re-solve at every group of coincident fronts.
    std::vector<Front> next;
    std::size_t i = 0;
    const std::size_t in = fronts_.size();
    State cur = left_;
    while (i < fronts_.size()) {
      const double x = fronts_[i].position(tg);
      std::size_t j = i;
      bool interface = fronts_[i].kind == WaveKind::a_wave;
      double anchor = interface ? fronts_[i].x0 : x;
      while (j + 1 < fronts_.size() && std::abs(fronts_[j + 1].position(tg) - x) <= cluster_dx) {
        ++j;
        if (fronts_[j].kind == WaveKind::a_wave) {
          interface = true;
          anchor = fronts_[j].x0;
        }
      }
      const auto rs = states[j + 1];
      const State r = locate(rs.p, rs.a);
      for (std::size_t k = i; k <= j; ++k) log_.fronts[fronts_[k].rec].death = tg;
      for (auto& f : emit(solve_between(cur, r, interface, anchor), anchor, tg)) next.push_back(f);
      cur = r;
      i = j + 1;
    }
    fronts_ = std::move(next);
    record_sample(true);
    const auto& m = log_.monitors.back();
    log_.events.push_back({tg, EventType::g_jump, 0.0, in, fronts_.size(), m.T, m.Q, m.G});
  }

  TrackerProblem pb_;
  TrackerLog log_;
  std::shared_ptr<const FluxGrid> grid_;
  std::vector<Front> fronts_;
  State left_;
  std::vector<SideState> shared_;
  double t_ = 0.0;
  double cap_ = 0.0;
  std::size_t n_ = 0;
  std::size_t events_ = 0;
  std::uint64_t seq_ = 0;
  bool done_ = false;
};

/// Convenience: build, run, return the log.
inline TrackerLog track(TrackerProblem pb) {
  Tracker tr(std::move(pb));
  tr.run();
  return tr.take_log();
}

}  // namespace hjft
