// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "qyao/adversary.hpp"

namespace qyao::adversary {

void check_same_shape(const Scenario& a, const Scenario& b) {
  auto fail = [](const std::string& what) { throw AdversaryError("scenarios differ in public data: " + what); };
  if (graph::to_json(a.setup.dtg.base()) != graph::to_json(b.setup.dtg.base())) fail("base graph");
  if (a.setup.client_wires != b.setup.client_wires || a.setup.server_wires != b.setup.server_wires) fail("wire ownership");
  if (a.client_input.references != b.client_input.references ||
      a.client_input.amplitudes.size() != b.client_input.amplitudes.size())
    fail("client input shape");
  if (a.server_input.references != b.server_input.references ||
      a.server_input.amplitudes.size() != b.server_input.amplitudes.size())
    fail("server input shape");
  if (a.options.mode != b.options.mode || a.options.flag_bits != b.options.flag_bits) fail("protocol mode");
}

nlohmann::json to_json(const BlindnessReport& r) {
  nlohmann::json j{{"mode", r.mode}, {"samples", r.samples}, {"views", r.views}};
  if (r.mode == "exact") {
    j["distance"] = r.distance;
  } else {
    j["max_z"] = r.max_z;
    auto per = nlohmann::json::array();
    for (const auto& [v, z] : r.z_by_vertex) per.push_back({{"vertex", v}, {"z", z}});
    j["z_by_vertex"] = per;
  }
  return j;
}

namespace {

using ViewKey = std::vector<int>;
using ViewMap = std::map<ViewKey, Eigen::MatrixXcd>;

/// Sub-normalised server view: for each (order, delta sequence), the weighted
/// density matrix of every DT(G) qubit.
ViewMap exact_view(const Scenario& sc) {
  const auto& setup = sc.setup;
  const auto& dtg = setup.dtg;
  const int n = dtg.size();
  if (dtg.base().size() != 1) throw AdversaryError("exact blindness needs a single-base-vertex graph");
  if (!setup.server_wires.empty()) throw AdversaryError("exact blindness needs the client to own every wire");

  std::vector<VertexId> measured, all(n);
  std::iota(all.begin(), all.end(), 0);
  for (VertexId q = 0; q < n; ++q)
    if (!setup.is_output_location(dtg.location(q))) measured.push_back(q);
  std::vector<std::vector<VertexId>> orders;
  {
    auto o = measured;
    do orders.push_back(o);
    while (std::next_permutation(o.begin(), o.end()));
  }

  ViewMap view;
  std::uint64_t cases = 0;
  const std::uint64_t thetas = std::uint64_t{1} << (3 * n);
  for (int perm = 0; perm < 6; ++perm) {
    const std::array<int, 1> perms{perm};
    protocol::ClientSecrets base;
    base.colouring = graph::colouring_from_permutations(dtg, perms);
    base.theta.assign(n, Angle::zero());
    base.r.assign(n, 0);
    base.d.assign(n, 0);
    base.x.assign(n, 0);
    protocol::finalize_secrets(setup, base);

    std::vector<VertexId> dummies, xs;
    for (VertexId q = 0; q < n; ++q) {
      if (base.dummy[q]) dummies.push_back(q);
      if (dtg.base().is_input(dtg.location(q)) && base.computation[dtg.location(q)] == q) xs.push_back(q);
    }
    const std::uint64_t d_count = std::uint64_t{1} << dummies.size();
    const std::uint64_t x_count = std::uint64_t{1} << xs.size();

    for (std::uint64_t t = 0; t < thetas; ++t)
      for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r)
        for (std::uint64_t dm = 0; dm < d_count; ++dm)
          for (std::uint64_t xm = 0; xm < x_count; ++xm) {
            protocol::ClientSecrets s = base;
            for (int q = 0; q < n; ++q) {
              s.theta[q] = Angle(static_cast<int>((t >> (3 * q)) & 7U));
              s.r[q] = (r >> q) & 1U;
            }
            for (std::size_t k = 0; k < dummies.size(); ++k) s.d[dummies[k]] = (dm >> k) & 1U;
            for (std::size_t k = 0; k < xs.size(); ++k) s.x[xs[k]] = (xm >> k) & 1U;
            protocol::Client client(setup, s);
            qsim::QuantumState st;
            client.prepare_qubits(st, sc.client_input);
            const Eigen::MatrixXcd rho = st.reduced_density(all);
            for (const auto& order : orders) {
              ViewKey key;
              for (VertexId q : order) {
                key.push_back(q);
                key.push_back(client.delta(q).eighths());
              }
              auto [it, fresh] = view.try_emplace(key, Eigen::MatrixXcd::Zero(rho.rows(), rho.cols()));
              it->second += rho;
              ++cases;
            }
          }
  }
  for (auto& [key, rho] : view) rho /= static_cast<double>(cases);
  return view;
}

double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

BlindnessReport blindness_exact(const Scenario& a, const Scenario& b) {
  check_same_shape(a, b);
  const ViewMap va = exact_view(a), vb = exact_view(b);
  BlindnessReport rep;
  rep.mode = "exact";
  double total = 0.0;
  std::set<ViewKey> keys;
  for (const auto& [k, _] : va) keys.insert(k);
  for (const auto& [k, _] : vb) keys.insert(k);
  for (const auto& k : keys) {
    auto ia = va.find(k), ib = vb.find(k);
    if (ia == va.end()) total += trace_norm(ib->second);
    else if (ib == vb.end()) total += trace_norm(ia->second);
    else total += trace_norm(ia->second - ib->second);
  }
  rep.distance = total / 2.0;
  rep.views = keys.size();
  return rep;
}

namespace {

using Histogram = std::vector<std::array<std::uint64_t, 16>>;

void add_rounds(Histogram& h, const protocol::Transcript& t) {
  for (const auto& r : t.rounds) h[r.vertex][r.delta.eighths() * 2 + (r.b ? 1 : 0)] += 1;
}

/// Wilson-Hilferty normal approximation of a chi-square upper tail.
double chi_square_z(double chi2, int dof) {
  if (dof <= 0) return 0.0;
  const double k = dof;
  return (std::cbrt(chi2 / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
}

}  // namespace

BlindnessReport blindness_montecarlo(const Scenario& a, const Scenario& b, std::uint64_t samples, std::uint64_t seed,
                                     int jobs) {
  check_same_shape(a, b);
  if (samples == 0) throw AdversaryError("at least one sample needed");
  const int n = a.setup.dtg.size();
  jobs = std::max(1, std::min<int>(jobs, 256));
  std::vector<Histogram> ha(jobs, Histogram(n)), hb(jobs, Histogram(n));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](int w) {
    try {
      for (std::uint64_t i = w; i < samples; i += jobs) {
        auto oa = a.options, ob = b.options;
        oa.record_messages = ob.record_messages = false;
        add_rounds(ha[w], protocol::run_qyao(a.setup, a.client_input, a.server_input, trial_seed(seed, 2 * i), oa).transcript);
        add_rounds(hb[w], protocol::run_qyao(b.setup, b.client_input, b.server_input, trial_seed(seed, 2 * i + 1), ob).transcript);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BlindnessReport rep;
  rep.mode = "montecarlo";
  rep.samples = samples;
  for (VertexId q = 0; q < n; ++q) {
    std::array<std::uint64_t, 16> ca{}, cb{};
    for (int w = 0; w < jobs; ++w)
      for (int c = 0; c < 16; ++c) {
        ca[c] += ha[w][q][c];
        cb[c] += hb[w][q][c];
      }
    const std::uint64_t na = std::accumulate(ca.begin(), ca.end(), std::uint64_t{0});
    const std::uint64_t nb = std::accumulate(cb.begin(), cb.end(), std::uint64_t{0});
    if (na == 0 && nb == 0) continue;
    if (na != nb) throw AdversaryError("vertex " + std::to_string(q) + " measured in only one scenario");
    double chi2 = 0.0;
    int cells = 0;
    for (int c = 0; c < 16; ++c) {
      const double sum = static_cast<double>(ca[c] + cb[c]);
      if (sum == 0) continue;
      ++cells;
      const double diff = static_cast<double>(ca[c]) - static_cast<double>(cb[c]);
      chi2 += diff * diff / sum;
    }
    rep.views += cells;
    const double z = chi_square_z(chi2, cells - 1);
    rep.z_by_vertex.emplace_back(q, z);
    rep.max_z = std::max(rep.max_z, z);
  }
  return rep;
}

}  // namespace qyao::adversary
