#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "heartsiam/hsmm.hpp"
#include "heartsiam/rng.hpp"

using namespace heartsiam;

namespace {

struct Run {
  int state;
  int dur;
};

// Independent scorer: Gaussian duration log-density plus emission sums,
// written directly from the model definition.
double oracle_score(const std::vector<Run>& runs, const std::vector<double>& log_em,
                    std::size_t n_states, const DurationModel& dur) {
  double score = 0.0;
  std::size_t t = 0;
  for (const auto& run : runs) {
    const auto& d = dur.states[static_cast<std::size_t>(run.state)];
    const double z = (static_cast<double>(run.dur) - d.mean) / d.std;
    score += -0.5 * z * z - std::log(d.std) - 0.5 * std::log(2.0 * kPi);
    for (int i = 0; i < run.dur; ++i, ++t)
      score += log_em[t * n_states + static_cast<std::size_t>(run.state)];
  }
  return score;
}

// Exhaustive enumeration of every valid segmentation: cyclic successor
// states; interior segments within [min, max]; the first and last segments
// may be truncated anywhere in [1, max].
void enumerate_rec(std::vector<Run>& runs, int t_remaining, int state, bool is_first,
                   const std::vector<double>& log_em, std::size_t n_states,
                   const DurationModel& dur, double& best) {
  const auto& d = dur.states[static_cast<std::size_t>(state)];
  for (int len = 1; len <= d.max && len <= t_remaining; ++len) {
    const bool is_last = (len == t_remaining);
    if (!is_first && !is_last && len < d.min) continue;
    runs.push_back({state, len});
    if (is_last) {
      best = std::max(best, oracle_score(runs, log_em, n_states, dur));
    } else {
      enumerate_rec(runs, t_remaining - len, (state + 1) % static_cast<int>(n_states), false,
                    log_em, n_states, dur, best);
    }
    runs.pop_back();
  }
}

double oracle_best(const std::vector<double>& log_em, std::size_t n_states,
                   const DurationModel& dur) {
  const int t_len = static_cast<int>(log_em.size() / n_states);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Run> runs;
  for (int s0 = 0; s0 < static_cast<int>(n_states); ++s0)
    enumerate_rec(runs, t_len, s0, true, log_em, n_states, dur, best);
  return best;
}

std::vector<Run> to_runs(const StateSequence& seq) {
  std::vector<Run> runs;
  for (int s : seq.states) {
    if (!runs.empty() && runs.back().state == s) {
      ++runs.back().dur;
    } else {
      runs.push_back({s, 1});
    }
  }
  return runs;
}

DurationModel random_duration_model(std::size_t n_states, rng::Counter& r, int t_len) {
  DurationModel dur;
  for (std::size_t s = 0; s < n_states; ++s) {
    StateDuration d;
    d.min = 1 + static_cast<int>(r.next_index(2));
    d.max = d.min + static_cast<int>(r.next_index(static_cast<std::uint64_t>(t_len)));
    d.mean = d.min + (d.max - d.min) * r.next_double();
    if (d.mean <= 0.0) d.mean = 0.5 * (d.min + d.max);
    d.std = 0.3 + 2.0 * r.next_double();
    dur.states.push_back(d);
  }
  return dur;
}

}  // namespace

TEST_CASE("viterbi matches exhaustive enumeration on random small instances") {
  rng::Counter r(rng::chain(2024, "hsmm-oracle"));
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int t_len = 4 + static_cast<int>(r.next_index(9));  // 4..12
    const std::size_t n_states = 2;
    std::vector<double> log_em(static_cast<std::size_t>(t_len) * n_states);
    for (auto& v : log_em) v = r.next_normal();
    const DurationModel dur = random_duration_model(n_states, r, t_len);

    const StateSequence seq = hsmm_viterbi(log_em, n_states, dur, 50.0);
    REQUIRE(seq.states.size() == static_cast<std::size_t>(t_len));

    const double best = oracle_best(log_em, n_states, dur);
    const double decoded = oracle_score(to_runs(seq), log_em, n_states, dur);
    REQUIRE(decoded == best);  // same scorer on both sides: exact comparison
    ++checked;
  }
  REQUIRE(checked == 150);
}

TEST_CASE("viterbi also matches enumeration with four states") {
  rng::Counter r(rng::chain(99, "hsmm-oracle-4"));
  for (int trial = 0; trial < 40; ++trial) {
    const int t_len = 6 + static_cast<int>(r.next_index(7));
    const std::size_t n_states = 4;
    std::vector<double> log_em(static_cast<std::size_t>(t_len) * n_states);
    for (auto& v : log_em) v = r.next_normal();
    const DurationModel dur = random_duration_model(n_states, r, t_len);
    const StateSequence seq = hsmm_viterbi(log_em, n_states, dur, 50.0);
    const double best = oracle_best(log_em, n_states, dur);
    REQUIRE(oracle_score(to_runs(seq), log_em, n_states, dur) == best);
  }
}

TEST_CASE("decoded sequences obey the cyclic state order") {
  rng::Counter r(rng::chain(7, "hsmm-cyclic"));
  for (int trial = 0; trial < 50; ++trial) {
    const int t_len = 30 + static_cast<int>(r.next_index(50));
    std::vector<double> log_em(static_cast<std::size_t>(t_len) * 4);
    for (auto& v : log_em) v = r.next_normal();
    DurationModel dur;
    for (int s = 0; s < 4; ++s) {
      StateDuration d;
      d.min = 2;
      d.max = 20;
      d.mean = 4.0 + static_cast<double>(s);
      d.std = 2.0;
      dur.states.push_back(d);
    }
    const StateSequence seq = hsmm_viterbi(log_em, 4, dur, 50.0);
    for (std::size_t t = 1; t < seq.states.size(); ++t) {
      const int a = seq.states[t - 1], b = seq.states[t];
      REQUIRE((b == a || b == (a + 1) % 4));
    }
  }
}

TEST_CASE("decoded likelihood beats randomly sampled valid segmentations") {
  rng::Counter r(rng::chain(11, "hsmm-sampled"));
  const int t_len = 60;
  const std::size_t n_states = 4;
  std::vector<double> log_em(static_cast<std::size_t>(t_len) * n_states);
  for (auto& v : log_em) v = r.next_normal();
  DurationModel dur;
  for (int s = 0; s < 4; ++s) {
    StateDuration d;
    d.min = 2;
    d.max = 25;
    d.mean = 5.0 + 2.0 * s;
    d.std = 2.0;
    dur.states.push_back(d);
  }
  const StateSequence seq = hsmm_viterbi(log_em, n_states, dur, 50.0);
  const double decoded = oracle_score(to_runs(seq), log_em, n_states, dur);

  for (int i = 0; i < 1000; ++i) {
    // sample a random valid segmentation
    std::vector<Run> runs;
    int t = t_len;
    int state = static_cast<int>(r.next_index(n_states));
    bool first = true;
    while (t > 0) {
      const auto& d = dur.states[static_cast<std::size_t>(state)];
      const int lo = first ? 1 : d.min;
      int len = lo + static_cast<int>(r.next_index(static_cast<std::uint64_t>(d.max - lo + 1)));
      if (len >= t) len = t;  // final segment may truncate
      runs.push_back({state, len});
      t -= len;
      state = (state + 1) % static_cast<int>(n_states);
      first = false;
    }
    REQUIRE(oracle_score(runs, log_em, n_states, dur) <= decoded);
  }
}

TEST_CASE("uniform emissions give the pure duration-model periodic sequence") {
  const int t_len = 40;
  const std::size_t n_states = 4;
  const std::vector<double> log_em(static_cast<std::size_t>(t_len) * n_states, -1.0);
  DurationModel dur;
  for (int s = 0; s < 4; ++s) {
    StateDuration d;
    d.min = 2;
    d.max = 15;
    d.mean = 10.0;  // strongly prefers 10-tick segments
    d.std = 0.5;
    dur.states.push_back(d);
  }
  const StateSequence seq = hsmm_viterbi(log_em, n_states, dur, 50.0);
  // with emissions constant, the optimum is exact mean-length segments
  const auto runs = to_runs(seq);
  REQUIRE(runs.size() == 4);
  for (const auto& run : runs) REQUIRE(run.dur == 10);
}

TEST_CASE("infeasibly short sequences raise a data error") {
  DurationModel dur;
  StateDuration d;
  d.min = 5;
  d.max = 6;
  d.mean = 5.5;
  d.std = 1.0;
  dur.states = {d, d};
  // T=1 is representable as a single truncated segment, so use an emission
  // matrix with an impossible state count instead
  REQUIRE_THROWS_AS(hsmm_viterbi(std::vector<double>(3, 0.0), 2, dur, 50.0), ConfigError);
}
