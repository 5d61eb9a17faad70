#include "absorbing/structure.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "absorbing/errors.hpp"

namespace absorbing {
namespace {

// Calls fn(profile) for every profile in the product of the given sets.
template <typename Fn>
bool for_each_in_product(const std::vector<std::vector<int>>& sets, Fn&& fn) {
  const std::size_t n = sets.size();
  for (const auto& s : sets) {
    if (s.empty()) return true;
  }
  std::vector<std::size_t> pos(n, 0);
  Profile a(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) a[i] = sets[i][pos[i]];
    if (!fn(a)) return false;
    std::size_t i = n;
    while (i-- > 0) {
      if (++pos[i] < sets[i].size()) break;
      pos[i] = 0;
      if (i == 0) return true;
    }
  }
}

// True if p(a_J', b) > 0 for some b in S over the players outside mask.
bool absorbs_against(const Game& g, const Support& s, unsigned mask,
                     const std::vector<int>& full_actions) {
  std::vector<std::vector<int>> sets(g.num_players());
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    if (mask & (1u << i)) sets[i] = {full_actions[i]};
    else sets[i] = s[i];
  }
  bool found = false;
  for_each_in_product(sets, [&](const Profile& a) {
    if (g.p(a) > 0.0) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

std::size_t product_size(const std::vector<std::vector<int>>& sets) {
  std::size_t n = 1;
  for (const auto& s : sets) n *= s.size();
  return n;
}

bool rectangle_in_component(const Game& g, const AbsorptionStructure& st, const Support& s,
                            int l) {
  return for_each_in_product(s, [&](const Profile& a) { return st.component_of[g.index(a)] == l; });
}

}  // namespace

AbsorptionStructure build_structure(const Game& g) {
  AbsorptionStructure st;
  const std::size_t total = g.num_profiles();
  const std::size_t n = g.num_players();
  st.component_of.assign(total, -1);
  std::vector<bool> in_b(total, false);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!g.absorbing(idx)) {
      st.nonabsorbing.push_back(idx);
      in_b[idx] = true;
    }
  }
  std::vector<bool> visited(total, false);
  for (std::size_t start : st.nonabsorbing) {
    if (visited[start]) continue;
    const int label = static_cast<int>(st.components.size());
    Component comp;
    std::deque<std::size_t> queue{start};
    visited[start] = true;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      comp.members.push_back(cur);
      st.component_of[cur] = label;
      Profile a = g.profile(cur);
      for (std::size_t i = 0; i < n; ++i) {
        const int own = a[i];
        for (int b = 0; b < static_cast<int>(g.num_actions(i)); ++b) {
          if (b == own) continue;
          a[i] = b;
          const std::size_t nb = g.index(a);
          if (in_b[nb] && !visited[nb]) {
            visited[nb] = true;
            queue.push_back(nb);
          }
        }
        a[i] = own;
      }
    }
    std::sort(comp.members.begin(), comp.members.end());
    comp.projections.assign(n, {});
    for (std::size_t idx : comp.members) {
      const Profile a = g.profile(idx);
      for (std::size_t i = 0; i < n; ++i) comp.projections[i].push_back(a[i]);
    }
    for (auto& proj : comp.projections) {
      std::sort(proj.begin(), proj.end());
      proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
    }
    comp.rectangular = comp.members.size() == product_size(comp.projections);
    if (!comp.rectangular) {
      for_each_in_product(comp.projections, [&](const Profile& a) {
        if (st.component_of[g.index(a)] != label) {
          comp.witness = a;
          return false;
        }
        return true;
      });
    }
    st.components.push_back(std::move(comp));
  }
  return st;
}

PreconditionResult check_precondition(const AbsorptionStructure& s) {
  PreconditionResult res;
  for (std::size_t l = 0; l < s.components.size(); ++l) {
    if (s.components[l].rectangular) {
      res.pass = false;
      res.rectangular_component = l;
      break;
    }
  }
  return res;
}

bool rectangle_nonabsorbing(const Game& g, const Support& s) {
  return for_each_in_product(s, [&](const Profile& a) { return !(g.p(a) > 0.0); });
}

std::vector<Exit> exits_at_support(const Game& g, const Support& s) {
  const std::size_t n = g.num_players();
  if (s.size() != n) throw Error(ErrorCode::InvalidArgument, "support has wrong number of players");
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i].empty()) throw Error(ErrorCode::InvalidArgument, "support sets must be nonempty");
  }
  if (!rectangle_nonabsorbing(g, s)) {
    throw Error(ErrorCode::SupportNotNonabsorbing, "support rectangle contains an absorbing profile");
  }
  std::vector<std::vector<int>> outside(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 0; b < static_cast<int>(g.num_actions(i)); ++b) {
      if (!std::binary_search(s[i].begin(), s[i].end(), b)) outside[i].push_back(b);
    }
  }
  std::vector<Exit> exits;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    // A member playing inside its own support can be dropped from the
    // coalition without losing absorption, so minimal exits use outside actions.
    std::vector<std::vector<int>> sets(n);
    std::vector<int> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sets[i] = outside[i];
        members.push_back(static_cast<int>(i));
      } else {
        sets[i] = {0};
      }
    }
    for_each_in_product(sets, [&](const Profile& a) {
      if (!absorbs_against(g, s, mask, a)) return true;
      for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) {
        if (absorbs_against(g, s, sub, a)) return true;
      }
      Exit e;
      e.coalition = members;
      for (int i : members) e.actions.push_back(a[static_cast<std::size_t>(i)]);
      exits.push_back(std::move(e));
      return true;
    });
  }
  return exits;
}

bool has_joint_exit(const Game& g, const Support& s) {
  for (const Exit& e : exits_at_support(g, s)) {
    if (e.joint()) return true;
  }
  return false;
}

std::vector<Support> product_supports(const Game& g, const AbsorptionStructure& st, std::size_t l) {
  const Component& comp = st.components.at(l);
  const std::size_t n = g.num_players();
  std::size_t count = 1;
  for (const auto& proj : comp.projections) {
    count *= (std::size_t{1} << proj.size()) - 1;
    if (count > 5'000'000) {
      throw Error(ErrorCode::InvalidArgument, "too many product supports to enumerate");
    }
  }
  std::vector<Support> out;
  std::vector<unsigned> masks(n, 1);
  while (true) {
    Support s(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < comp.projections[i].size(); ++k) {
        if (masks[i] & (1u << k)) s[i].push_back(comp.projections[i][k]);
      }
    }
    if (rectangle_in_component(g, st, s, static_cast<int>(l))) out.push_back(std::move(s));
    std::size_t i = n;
    bool done = true;
    while (i-- > 0) {
      if (++masks[i] < (1u << comp.projections[i].size())) {
        done = false;
        break;
      }
      masks[i] = 1;
    }
    if (done) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Support> maximal_supports(const Game& g, const AbsorptionStructure& st, std::size_t l) {
  const Component& comp = st.components.at(l);
  std::vector<Support> out;
  for (Support& s : product_supports(g, st, l)) {
    bool maximal = true;
    for (std::size_t i = 0; i < s.size() && maximal; ++i) {
      for (int b : comp.projections[i]) {
        if (std::binary_search(s[i].begin(), s[i].end(), b)) continue;
        Support bigger = s;
        bigger[i].insert(std::upper_bound(bigger[i].begin(), bigger[i].end(), b), b);
        if (rectangle_in_component(g, st, bigger, static_cast<int>(l))) {
          maximal = false;
          break;
        }
      }
    }
    if (maximal) out.push_back(std::move(s));
  }
  return out;
}

bool rectangularity_via_exits(const Game& g, const AbsorptionStructure& st, std::size_t l) {
  for (const Support& s : product_supports(g, st, l)) {
    if (has_joint_exit(g, s)) return false;
  }
  return true;
}

namespace {

// A_i x S_{-i} contains only nonabsorbing profiles, for every i.
bool all_deviations_nonabsorbing(const Game& g, const Support& s) {
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    Support cross = s;
    cross[i].clear();
    for (int b = 0; b < static_cast<int>(g.num_actions(i)); ++b) cross[i].push_back(b);
    if (!rectangle_nonabsorbing(g, cross)) return false;
  }
  return true;
}

}  // namespace

std::optional<MixedProfile> find_nonabsorbing_equilibrium(const Game& g,
                                                          const AbsorptionStructure& st) {
  // The property is inherited by sub-supports, so a pure profile exists
  // whenever any support works; grow the first one greedily.
  for (std::size_t idx : st.nonabsorbing) {
    const Profile a = g.profile(idx);
    Support s(g.num_players());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = {a[i]};
    if (!all_deviations_nonabsorbing(g, s)) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int b = 0; b < static_cast<int>(g.num_actions(i)); ++b) {
        if (std::binary_search(s[i].begin(), s[i].end(), b)) continue;
        Support bigger = s;
        bigger[i].insert(std::upper_bound(bigger[i].begin(), bigger[i].end(), b), b);
        if (all_deviations_nonabsorbing(g, bigger)) s = std::move(bigger);
      }
    }
    return uniform_profile(g, s);
  }
  return std::nullopt;
}

Support support_of(const MixedProfile& x) {
  Support s(x.num_players());
  for (std::size_t i = 0; i < x.num_players(); ++i) s[i] = x.support(i);
  return s;
}

}  // namespace absorbing
