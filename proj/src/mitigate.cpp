#include "fairbios/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include <json.hpp>

namespace fairbios {

// ---------------------------------------------------------------------------
// oversample / class weights

std::vector<Record> oversample(const std::vector<Record>& train, TargetLabel target,
                               int num_classes, uint64_t seed) {
  if (train.empty()) throw_data("EmptyClassList", "cannot oversample an empty training set");
  auto label_of = [&](const Record& r) {
    return target == TargetLabel::Gender ? r.gender_id : r.profession_id;
  };

  std::vector<std::vector<size_t>> by_class(static_cast<size_t>(num_classes));
  for (size_t i = 0; i < train.size(); ++i) {
    int c = label_of(train[i]);
    if (c < 0 || c >= num_classes)
      throw_data("LabelOutOfRange", "record label " + std::to_string(c));
    by_class[static_cast<size_t>(c)].push_back(i);
  }
  size_t majority = 0;
  for (const auto& members : by_class) majority = std::max(majority, members.size());
  for (int c = 0; c < num_classes; ++c) {
    if (by_class[static_cast<size_t>(c)].empty())
      throw_data("MissingClass", "class " + std::to_string(c) + " absent from training split");
  }

  std::vector<Record> out = train;
  Rng rng(derive_seed(seed, "oversample"));
  for (int c = 0; c < num_classes; ++c) {
    const auto& members = by_class[static_cast<size_t>(c)];
    for (size_t k = members.size(); k < majority; ++k)
      out.push_back(train[members[rng.next_below(members.size())]]);
  }
  return out;
}

std::vector<double> compute_class_weights(const std::vector<int>& labels, int num_classes) {
  if (labels.empty()) throw_data("EmptyInput", "no labels");
  std::vector<size_t> counts(static_cast<size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw_data("LabelOutOfRange", "label " + std::to_string(y));
    counts[static_cast<size_t>(y)]++;
  }
  std::vector<double> weights(static_cast<size_t>(num_classes));
  double n = static_cast<double>(labels.size());
  for (int c = 0; c < num_classes; ++c) {
    if (counts[static_cast<size_t>(c)] == 0)
      throw_data("MissingClass", "class " + std::to_string(c) + " has no labels");
    weights[static_cast<size_t>(c)] =
        n / (static_cast<double>(num_classes) * static_cast<double>(counts[static_cast<size_t>(c)]));
  }
  return weights;
}

// ---------------------------------------------------------------------------
// equalized-odds fitting

void GroupedScores::validate() const {
  if (scores.size() != y_true.size() || scores.size() != group.size())
    throw_data("LengthMismatch", "GroupedScores arrays must be equal length");
  if (scores.empty()) throw_data("Empty", "GroupedScores is empty");
  for (double s : scores)
    if (!(s >= 0.0 && s <= 1.0))
      throw_data("BadScore", "scores must be probabilities in [0,1]");
  for (int y : y_true)
    if (y != 0 && y != 1) throw_data("BadLabel", "y_true must be binary");
}

namespace {

constexpr double kRejectAllThreshold = 2.0;  // scores are <= 1
constexpr double kAcceptAllThreshold = 0.0;  // scores are >= 0
constexpr double kGeomTol = 1e-9;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = kRejectAllThreshold;
};

struct GroupRoc {
  int group_id = 0;
  std::vector<RocPoint> pts;   // staircase, (0,0) .. (1,1), sorted by (fpr, tpr)
  std::vector<size_t> hull;    // indices into pts, upper concave chain
  size_t num_pos = 0, num_neg = 0;
  bool degenerate = false;     // all scores identical
};

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

GroupRoc build_roc(int group_id, const std::vector<std::pair<double, int>>& samples) {
  GroupRoc roc;
  roc.group_id = group_id;
  for (const auto& [s, y] : samples) (y == 1 ? roc.num_pos : roc.num_neg)++;

  std::vector<std::pair<double, int>> sorted = samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  roc.pts.push_back({0.0, 0.0, kRejectAllThreshold});
  size_t tp = 0, fp = 0;
  size_t i = 0;
  size_t distinct = 0;
  while (i < sorted.size()) {
    double s = sorted[i].first;
    while (i < sorted.size() && sorted[i].first == s) {
      (sorted[i].second == 1 ? tp : fp)++;
      ++i;
    }
    ++distinct;
    roc.pts.push_back({roc.num_neg ? static_cast<double>(fp) / static_cast<double>(roc.num_neg) : 0.0,
                       roc.num_pos ? static_cast<double>(tp) / static_cast<double>(roc.num_pos) : 0.0,
                       s});
  }
  roc.degenerate = distinct <= 1;

  // Upper hull over the staircase (points are already sorted by fpr asc with
  // tpr asc within equal fpr).
  for (size_t p = 0; p < roc.pts.size(); ++p) {
    while (roc.hull.size() >= 2) {
      const RocPoint& a = roc.pts[roc.hull[roc.hull.size() - 2]];
      const RocPoint& b = roc.pts[roc.hull.back()];
      const RocPoint& c = roc.pts[p];
      if (cross(b.fpr - a.fpr, b.tpr - a.tpr, c.fpr - a.fpr, c.tpr - a.tpr) >= -1e-15)
        roc.hull.pop_back();
      else
        break;
    }
    roc.hull.push_back(p);
  }
  return roc;
}

// Mixture of the two endpoint thresholds that lands exactly on (fpr, tpr),
// assuming the point lies on the segment a-b. Returns nullopt if it does not
// reproduce both coordinates.
std::optional<GroupThresholds> mix_on_segment(const RocPoint& a, const RocPoint& b, double fpr,
                                              double tpr) {
  // lo = endpoint with the larger operating point (lower threshold).
  const RocPoint& lo = (a.fpr > b.fpr || (a.fpr == b.fpr && a.tpr > b.tpr)) ? a : b;
  const RocPoint& hi = (&lo == &a) ? b : a;
  double mix;
  if (std::abs(lo.fpr - hi.fpr) > std::abs(lo.tpr - hi.tpr)) {
    if (lo.fpr == hi.fpr) return std::nullopt;
    mix = (fpr - hi.fpr) / (lo.fpr - hi.fpr);
  } else {
    if (lo.tpr == hi.tpr) {
      if (std::abs(fpr - lo.fpr) > kGeomTol || std::abs(tpr - lo.tpr) > kGeomTol)
        return std::nullopt;
      mix = 1.0;
    } else {
      mix = (tpr - hi.tpr) / (lo.tpr - hi.tpr);
    }
  }
  if (mix < -1e-9 || mix > 1.0 + 1e-9) return std::nullopt;
  mix = std::clamp(mix, 0.0, 1.0);
  double f = mix * lo.fpr + (1.0 - mix) * hi.fpr;
  double t = mix * lo.tpr + (1.0 - mix) * hi.tpr;
  if (std::abs(f - fpr) > kGeomTol || std::abs(t - tpr) > kGeomTol) return std::nullopt;
  GroupThresholds g;
  g.t_lo = lo.threshold;
  g.t_hi = hi.threshold;
  g.mix = mix;
  if (g.t_lo > g.t_hi) {
    std::swap(g.t_lo, g.t_hi);
    g.mix = 1.0 - g.mix;
  }
  return g;
}

// Exact two-threshold realization of (fpr, tpr) for one group, or nullopt.
// Tries, in order: an exact staircase point, a hull edge, a chord from (0,0),
// a chord to (1,1), and the diagonal.
std::optional<GroupThresholds> realize_exact(const GroupRoc& roc, double fpr, double tpr) {
  for (const RocPoint& p : roc.pts) {
    if (std::abs(p.fpr - fpr) <= kGeomTol && std::abs(p.tpr - tpr) <= kGeomTol) {
      GroupThresholds g;
      g.t_lo = g.t_hi = p.threshold;
      g.mix = 1.0;
      return g;
    }
  }
  for (size_t e = 0; e + 1 < roc.hull.size(); ++e) {
    const RocPoint& a = roc.pts[roc.hull[e]];
    const RocPoint& b = roc.pts[roc.hull[e + 1]];
    if (fpr < a.fpr - kGeomTol || fpr > b.fpr + kGeomTol) continue;
    if (std::abs(cross(b.fpr - a.fpr, b.tpr - a.tpr, fpr - a.fpr, tpr - a.tpr)) > kGeomTol)
      continue;
    if (auto g = mix_on_segment(a, b, fpr, tpr)) return g;
  }
  const RocPoint origin{0.0, 0.0, kRejectAllThreshold};
  const RocPoint all{1.0, 1.0, kAcceptAllThreshold};
  for (const RocPoint& q : roc.pts) {
    if (q.fpr + kGeomTol >= fpr && q.tpr + kGeomTol >= tpr &&
        std::abs(cross(q.fpr, q.tpr, fpr, tpr)) <= kGeomTol) {
      if (auto g = mix_on_segment(origin, q, fpr, tpr)) return g;
    }
    if (q.fpr <= fpr + kGeomTol && q.tpr <= tpr + kGeomTol &&
        std::abs(cross(1.0 - q.fpr, 1.0 - q.tpr, 1.0 - fpr, 1.0 - tpr)) <= kGeomTol) {
      if (auto g = mix_on_segment(q, all, fpr, tpr)) return g;
    }
  }
  if (std::abs(fpr - tpr) <= kGeomTol) {
    if (auto g = mix_on_segment(origin, all, fpr, tpr)) return g;
  }
  return std::nullopt;
}

struct Candidate {
  double fpr = 0.0, tpr = 0.0;
  std::map<int, GroupThresholds> legs;  // groups realized so far
};

// Intersection of segments a1-a2 and b1-b2 (including endpoints).
std::optional<std::pair<double, double>> segment_intersection(const RocPoint& a1,
                                                              const RocPoint& a2,
                                                              const RocPoint& b1,
                                                              const RocPoint& b2) {
  double rx = a2.fpr - a1.fpr, ry = a2.tpr - a1.tpr;
  double sx = b2.fpr - b1.fpr, sy = b2.tpr - b1.tpr;
  double denom = cross(rx, ry, sx, sy);
  if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel / collinear
  double qpx = b1.fpr - a1.fpr, qpy = b1.tpr - a1.tpr;
  double u = cross(qpx, qpy, sx, sy) / denom;
  double v = cross(qpx, qpy, rx, ry) / denom;
  if (u < -1e-12 || u > 1.0 + 1e-12 || v < -1e-12 || v > 1.0 + 1e-12) return std::nullopt;
  u = std::clamp(u, 0.0, 1.0);
  return std::make_pair(a1.fpr + u * rx, a1.tpr + u * ry);
}

EOPolicy fit_degenerate_label_group(const GroupedScores& data,
                                    const std::vector<GroupRoc>& rocs) {
  // Every group is single-class: the labels and the groups coincide. Exact
  // equalized odds then only admits degenerate rules, so the fit instead
  // equalizes each group's correct-classification rate at a common value C:
  // all-positive groups get TPR = C, all-negative groups get FPR = 1 - C,
  // with C the best single-threshold accuracy minus the slack. Fitting
  // accuracy then lands at C and so does the largest one-vs-rest rate gap.
  size_t total = data.scores.size();
  size_t total_pos = 0;
  for (int y : data.y_true) total_pos += static_cast<size_t>(y);
  double pi = static_cast<double>(total_pos) / static_cast<double>(total);

  std::vector<std::pair<double, int>> pooled(total);
  for (size_t i = 0; i < total; ++i) pooled[i] = {data.scores[i], data.y_true[i]};
  GroupRoc pooled_roc = build_roc(-1, pooled);
  double best_acc = 0.0;
  for (const RocPoint& p : pooled_roc.pts)
    best_acc = std::max(best_acc, pi * p.tpr + (1.0 - pi) * (1.0 - p.fpr));

  double floor_acc = std::clamp(best_acc - kDegenerateAccuracySlack, 0.5, 1.0);

  EOPolicy policy;
  policy.label_equals_group = true;
  policy.target_tpr = floor_acc;
  policy.target_fpr = 1.0 - floor_acc;
  for (const GroupRoc& roc : rocs) {
    bool has_pos = roc.num_pos > 0;
    // The group's staircase varies along one axis only (TPR for all-positive
    // groups, FPR for all-negative ones); realize the target as a mixture of
    // the two adjacent staircase values along that axis.
    double target = has_pos ? floor_acc : 1.0 - floor_acc;
    auto axis = [&](const RocPoint& p) { return has_pos ? p.tpr : p.fpr; };
    const RocPoint* below = &roc.pts.front();
    const RocPoint* above = &roc.pts.back();
    for (const RocPoint& p : roc.pts) {
      if (axis(p) <= target && axis(p) >= axis(*below)) below = &p;
      if (axis(p) >= target && axis(p) <= axis(*above)) above = &p;
    }
    auto leg = mix_on_segment(*above, *below, has_pos ? 0.0 : target, has_pos ? target : 0.0);
    if (!leg) {
      // above == below only when the target is an exact staircase value.
      leg = GroupThresholds{};
      leg->t_lo = leg->t_hi = below->threshold;
      leg->mix = 1.0;
    }
    GroupThresholds g;
    g.t_lo = leg->t_lo;
    g.t_hi = leg->t_hi;
    g.mix = leg->mix;
    g.missing_class = true;
    policy.groups[roc.group_id] = g;
  }
  return policy;
}

}  // namespace

EOPolicy fit_eo_policy(const GroupedScores& data, int grid_resolution) {
  data.validate();
  if (grid_resolution < 2) throw_usage("BadGridResolution", "grid_resolution must be >= 2");

  std::map<int, std::vector<std::pair<double, int>>> by_group;
  for (size_t i = 0; i < data.scores.size(); ++i)
    by_group[data.group[i]].emplace_back(data.scores[i], data.y_true[i]);
  if (by_group.size() < 2) throw_data("SingleGroup", "equalized odds needs at least 2 groups");

  std::vector<GroupRoc> rocs;
  for (const auto& [gid, samples] : by_group) rocs.push_back(build_roc(gid, samples));

  size_t groups_missing_class = 0;
  for (const GroupRoc& roc : rocs)
    if (roc.num_pos == 0 || roc.num_neg == 0) ++groups_missing_class;
  if (groups_missing_class == rocs.size()) return fit_degenerate_label_group(data, rocs);
  if (groups_missing_class > 0)
    throw_data("GroupMissingClass",
               "a group lacks positive or negative examples for equalized-odds fitting");

  size_t total_pos = 0;
  for (int y : data.y_true) total_pos += static_cast<size_t>(y);
  double pi = static_cast<double>(total_pos) / static_cast<double>(data.y_true.size());

  std::vector<Candidate> candidates;

  // Hull vertices of every group.
  for (const GroupRoc& roc : rocs) {
    for (size_t idx : roc.hull) {
      Candidate c;
      c.fpr = roc.pts[idx].fpr;
      c.tpr = roc.pts[idx].tpr;
      GroupThresholds g;
      g.t_lo = g.t_hi = roc.pts[idx].threshold;
      g.mix = 1.0;
      c.legs[roc.group_id] = g;
      candidates.push_back(std::move(c));
    }
  }

  // Hull edges of one group crossed with hull edges and (0,0)/(1,1) fan
  // chords of another. Any such crossing is exactly realizable by both
  // groups, so the frontier gets densely covered by feasible targets.
  const RocPoint origin{0.0, 0.0, kRejectAllThreshold};
  const RocPoint all{1.0, 1.0, kAcceptAllThreshold};
  for (const GroupRoc& ga : rocs) {
    for (const GroupRoc& gb : rocs) {
      if (ga.group_id == gb.group_id) continue;
      for (size_t e = 0; e + 1 < ga.hull.size(); ++e) {
        const RocPoint& a1 = ga.pts[ga.hull[e]];
        const RocPoint& a2 = ga.pts[ga.hull[e + 1]];
        auto try_chord = [&](const RocPoint& b1, const RocPoint& b2) {
          auto hit = segment_intersection(a1, a2, b1, b2);
          if (!hit) return;
          auto leg_a = mix_on_segment(a1, a2, hit->first, hit->second);
          auto leg_b = mix_on_segment(b1, b2, hit->first, hit->second);
          if (!leg_a || !leg_b) return;
          Candidate c;
          c.fpr = hit->first;
          c.tpr = hit->second;
          c.legs[ga.group_id] = *leg_a;
          c.legs[gb.group_id] = *leg_b;
          candidates.push_back(std::move(c));
        };
        for (size_t f = 0; f + 1 < gb.hull.size(); ++f)
          try_chord(gb.pts[gb.hull[f]], gb.pts[gb.hull[f + 1]]);
        for (const RocPoint& q : gb.pts) {
          try_chord(origin, q);
          try_chord(q, all);
        }
      }
    }
  }

  // Diagonal grid: always realizable by every group as a coin flip between
  // reject-all and accept-all, so the feasible set is never empty.
  for (int j = 0; j < grid_resolution; ++j) {
    double x = static_cast<double>(j) / static_cast<double>(grid_resolution - 1);
    Candidate c;
    c.fpr = c.tpr = x;
    for (const GroupRoc& roc : rocs) {
      GroupThresholds g;
      g.t_lo = kAcceptAllThreshold;
      g.t_hi = kRejectAllThreshold;
      g.mix = x;
      if (x <= 0.0) {
        g.t_lo = g.t_hi = kRejectAllThreshold;
        g.mix = 1.0;
      } else if (x >= 1.0) {
        g.t_lo = g.t_hi = kAcceptAllThreshold;
        g.mix = 1.0;
      }
      c.legs[roc.group_id] = g;
    }
    candidates.push_back(std::move(c));
  }

  // Complete each candidate across all groups; discard what cannot be hit
  // exactly everywhere, then keep the accuracy-optimal target.
  const Candidate* best = nullptr;
  double best_acc = -1.0;
  bool best_single = false;
  std::vector<Candidate> completed;
  completed.reserve(candidates.size());
  for (Candidate& c : candidates) {
    bool ok = true;
    for (const GroupRoc& roc : rocs) {
      if (c.legs.count(roc.group_id)) continue;
      auto leg = realize_exact(roc, c.fpr, c.tpr);
      if (!leg) {
        ok = false;
        break;
      }
      c.legs[roc.group_id] = *leg;
    }
    if (!ok) continue;
    double acc = pi * c.tpr + (1.0 - pi) * (1.0 - c.fpr);
    bool single = true;
    for (const auto& [gid, leg] : c.legs)
      single = single && (leg.mix >= 1.0 - 1e-12 || leg.mix <= 1e-12);
    completed.push_back(std::move(c));
    const Candidate& cc = completed.back();
    // Deterministic preference: higher accuracy, then deterministic
    // thresholds, then lower FPR.
    if (acc > best_acc + 1e-12 ||
        (acc > best_acc - 1e-12 &&
         ((single && !best_single) ||
          (single == best_single && best && cc.fpr < best->fpr - 1e-12)))) {
      best = &cc;
      best_acc = acc;
      best_single = single;
    } else if (!best) {
      best = &cc;
      best_acc = acc;
      best_single = single;
    }
  }
  if (!best) throw_numeric("DegenerateScores", "no feasible equalized-odds target found");

  EOPolicy policy;
  policy.target_fpr = best->fpr;
  policy.target_tpr = best->tpr;
  policy.groups = best->legs;
  for (const GroupRoc& roc : rocs)
    if (roc.degenerate) policy.groups[roc.group_id].degenerate = true;
  return policy;
}

std::vector<int> apply_eo_policy(const EOPolicy& policy, const std::vector<double>& scores,
                                 const std::vector<int>& group, uint64_t seed) {
  if (scores.size() != group.size())
    throw_data("LengthMismatch", "scores and group must be equal length");
  std::vector<int> pred(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    auto it = policy.groups.find(group[i]);
    if (it == policy.groups.end())
      throw_data("UnknownGroup", "group " + std::to_string(group[i]) + " not covered by policy");
    const GroupThresholds& g = it->second;
    double u = counter_uniform(seed, i);
    double t = (u < g.mix) ? g.t_lo : g.t_hi;
    pred[i] = scores[i] >= t ? 1 : 0;
  }
  return pred;
}

std::pair<double, double> analytic_operating_point(const GroupThresholds& g,
                                                   const std::vector<double>& scores,
                                                   const std::vector<int>& y_true) {
  if (scores.size() != y_true.size())
    throw_data("LengthMismatch", "scores and labels must be equal length");
  auto rates_at = [&](double t) {
    size_t tp = 0, fp = 0, pos = 0, neg = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      bool hit = scores[i] >= t;
      if (y_true[i] == 1) {
        ++pos;
        if (hit) ++tp;
      } else {
        ++neg;
        if (hit) ++fp;
      }
    }
    double tpr = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
    double fpr = neg ? static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
    return std::make_pair(tpr, fpr);
  };
  auto lo = rates_at(g.t_lo);
  auto hi = rates_at(g.t_hi);
  return {g.mix * lo.first + (1.0 - g.mix) * hi.first,
          g.mix * lo.second + (1.0 - g.mix) * hi.second};
}

// ---------------------------------------------------------------------------
// multiclass reduction

MulticlassEOPolicy fit_eo_policy_multiclass(const std::vector<std::vector<double>>& scores,
                                            const std::vector<int>& y_true,
                                            const std::vector<int>& group,
                                            int grid_resolution) {
  if (scores.empty()) throw_data("Empty", "no scores");
  size_t n = scores.size();
  size_t num_classes = scores[0].size();
  if (y_true.size() != n || group.size() != n)
    throw_data("LengthMismatch", "scores, y_true, group must be equal length");

  std::set<int> group_ids(group.begin(), group.end());

  MulticlassEOPolicy out;
  for (size_t c = 0; c < num_classes; ++c) {
    GroupedScores gs;
    gs.scores.reserve(n);
    gs.y_true.reserve(n);
    gs.group = group;
    std::map<int, std::pair<size_t, size_t>> cell;  // group -> (pos, neg)
    for (size_t i = 0; i < n; ++i) {
      if (scores[i].size() != num_classes)
        throw_data("LengthMismatch", "ragged score matrix");
      gs.scores.push_back(scores[i][c]);
      int y = y_true[i] == static_cast<int>(c) ? 1 : 0;
      gs.y_true.push_back(y);
      (y ? cell[group[i]].first : cell[group[i]].second)++;
    }
    bool fit_ok = true;
    for (int gid : group_ids)
      fit_ok = fit_ok && cell[gid].first > 0 && cell[gid].second > 0;

    if (fit_ok) {
      EOPolicy p = fit_eo_policy(gs, grid_resolution);
      p.positive_class = static_cast<int>(c);
      out.per_class.push_back(std::move(p));
    } else {
      EOPolicy p;
      p.positive_class = static_cast<int>(c);
      p.pass_through = true;
      for (int gid : group_ids) {
        GroupThresholds g;  // fixed 0.5 threshold
        g.missing_class = cell[gid].first == 0 || cell[gid].second == 0;
        p.groups[gid] = g;
      }
      p.target_tpr = p.target_fpr = 0.0;
      out.per_class.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<int> apply_eo_policy_multiclass(const MulticlassEOPolicy& policy,
                                            const std::vector<std::vector<double>>& scores,
                                            const std::vector<int>& group, uint64_t seed) {
  size_t n = scores.size();
  if (group.size() != n) throw_data("LengthMismatch", "scores and group must align");
  size_t num_classes = policy.per_class.size();
  std::vector<int> pred(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (scores[i].size() != num_classes) throw_data("LengthMismatch", "ragged score matrix");
    double best_margin = 0.0;
    int best_class = -1;
    for (size_t c = 0; c < num_classes; ++c) {
      const EOPolicy& p = policy.per_class[c];
      auto it = p.groups.find(group[i]);
      if (it == p.groups.end())
        throw_data("UnknownGroup", "group " + std::to_string(group[i]) + " not covered");
      const GroupThresholds& g = it->second;
      double u = counter_uniform(derive_seed(seed, "class/" + std::to_string(c)), i);
      double t = (u < g.mix) ? g.t_lo : g.t_hi;
      double margin = scores[i][c] - t;
      if (best_class < 0 || margin > best_margin) {
        best_margin = margin;
        best_class = static_cast<int>(c);
      }
    }
    pred[i] = best_class;
  }
  return pred;
}

// ---------------------------------------------------------------------------
// serialization

std::string EOPolicy::to_json() const {
  nlohmann::json j;
  j["positive_class"] = positive_class;
  j["target_tpr"] = target_tpr;
  j["target_fpr"] = target_fpr;
  j["label_equals_group"] = label_equals_group;
  j["pass_through"] = pass_through;
  nlohmann::json gs = nlohmann::json::array();
  for (const auto& [gid, g] : groups) {
    gs.push_back({{"group", gid},
                  {"t_lo", g.t_lo},
                  {"t_hi", g.t_hi},
                  {"mix", g.mix},
                  {"degenerate", g.degenerate},
                  {"missing_class", g.missing_class}});
  }
  j["groups"] = gs;
  return j.dump(2);
}

EOPolicy EOPolicy::from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw_data("BadPolicyJson", "cannot parse EO policy");
  EOPolicy p;
  try {
    p.positive_class = j.at("positive_class").get<int>();
    p.target_tpr = j.at("target_tpr").get<double>();
    p.target_fpr = j.at("target_fpr").get<double>();
    p.label_equals_group = j.value("label_equals_group", false);
    p.pass_through = j.value("pass_through", false);
    for (const auto& gj : j.at("groups")) {
      GroupThresholds g;
      g.t_lo = gj.at("t_lo").get<double>();
      g.t_hi = gj.at("t_hi").get<double>();
      g.mix = gj.at("mix").get<double>();
      g.degenerate = gj.value("degenerate", false);
      g.missing_class = gj.value("missing_class", false);
      p.groups[gj.at("group").get<int>()] = g;
    }
  } catch (const nlohmann::json::exception& e) {
    throw_data("BadPolicyJson", e.what());
  }
  return p;
}

std::string MulticlassEOPolicy::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : per_class) j.push_back(nlohmann::json::parse(p.to_json()));
  return j.dump(2);
}

MulticlassEOPolicy MulticlassEOPolicy::from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw_data("BadPolicyJson", "multiclass policy must be a JSON array");
  MulticlassEOPolicy out;
  for (const auto& e : j) out.per_class.push_back(EOPolicy::from_json(e.dump()));
  return out;
}

}  // namespace fairbios
