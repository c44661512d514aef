#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tsnac;

TEST_CASE("residual bandwidth", "[adjust]") {
  CHECK(residual_bandwidth(7.5e7, std::vector<double>{0.0, 0.0}) == 7.5e7);
  CHECK(residual_bandwidth(7.5e7, std::vector<double>{1.2144e7}) == Catch::Approx(6.2856e7).epsilon(1e-15));
  CHECK(residual_bandwidth(7.5e7, std::vector<double>{5e7, 4e7}) < 0.0);
}

TEST_CASE("port context includes the candidate", "[adjust]") {
  NetworkGraph g;
  const auto a = g.add_node("ES1", NodeKind::EndSystem);
  const auto b = g.add_node("ES2", NodeKind::EndSystem);
  g.add_link(a, b, fx::kC);
  const auto cfg = make_empty_config(g, fx::classes(1), {1.12144e-3});
  auto ctx = make_port_context(cfg, 0, fx::flow(1, a, b, 12144, 2e-3, 1e-3));
  REQUIRE(ctx);
  CHECK(ctx->allocated[0] == Catch::Approx(1.2144e7).epsilon(1e-12));
  CHECK(ctx->residual == Catch::Approx(6.2856e7).epsilon(1e-12));
}

TEST_CASE("lemma step on random contexts", "[adjust][oracle]") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    auto ctx = fx::random_context(gen);
    if (!ctx || ctx->cls == ctx->n_classes()) continue;
    const int j = ctx->cls + 1 + static_cast<int>(u(gen) * (ctx->n_classes() - ctx->cls));
    const auto k = static_cast<std::size_t>(j - 1);
    if (ctx->bursts[k] == 0.0) continue;
    CHECK(lemma1_step(0.0, j, *ctx)->value == 0.0);
    const double total = ctx->residual * u(gen);
    auto r = lemma1_step(total, j, *ctx);
    REQUIRE(r);
    double higher = 0.0;
    for (int m = 1; m < j; ++m) higher += ctx->allocated[m - 1];
    const double a = fx::kC - higher;
    const double poly = oracle::lemma_root_polynomial(total, j, a, ctx->bursts[k], ctx->allocated[k], fx::kLmax);
    CHECK(r->value >= 0.0);
    CHECK(r->value <= total);
    CHECK(std::abs(r->value - poly) <= 1e-9 * std::max(poly, 1e-9 * total));
    const double before = oracle::class_delay(j, ctx->bursts[k], ctx->allocated[k], higher, fx::kC, fx::kLmax);
    const double after =
        oracle::class_delay(j, ctx->bursts[k], ctx->allocated[k] + total - r->value, higher + r->value, fx::kC, fx::kLmax);
    CHECK(oracle::rel_close(before, ctx->deadlines[k], 1e-9));
    CHECK(oracle::rel_close(after, ctx->deadlines[k], 1e-9));
    ++checked;
  }
}

TEST_CASE("an empty lower class takes no extra bandwidth", "[adjust]") {
  PortAdjustContext ctx;
  ctx.cls = 1;
  ctx.port = {fx::kC, fx::kLmax};
  ctx.idle_slope_max = 7.5e7;
  ctx.bursts = {12144.0, 0.0};
  ctx.deadlines = {2e-3, 4e-3};
  ctx.allocated = oracle::deadline_allocation(ctx.bursts, ctx.deadlines, fx::kC, fx::kLmax);
  ctx.residual = residual_bandwidth(ctx.idle_slope_max, ctx.allocated);
  CHECK(lemma1_step(1e6, 2, ctx)->value == 1e6);
}

TEST_CASE("band mapping", "[adjust]") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    auto ctx = fx::random_context(gen);
    if (!ctx) continue;
    const auto i = static_cast<std::size_t>(ctx->cls - 1);

    auto zero = map_band_to_deadline(0.0, *ctx);
    REQUIRE(zero);
    CHECK(zero->deadline == ctx->deadlines[i]);
    for (double phi : zero->extra) CHECK(phi == 0.0);

    const double extra = ctx->residual * u(gen);
    auto m = map_band_to_deadline(extra, *ctx);
    REQUIRE(m);
    double sum = 0.0;
    for (double phi : m->extra) sum += phi;
    CHECK(oracle::rel_close(sum, extra, 1e-12));
    CHECK(m->deadline <= ctx->deadlines[i]);

    auto dl = ctx->deadlines;
    dl[i] = m->deadline;
    const auto re = oracle::deadline_allocation(ctx->bursts, dl, fx::kC, fx::kLmax);
    for (std::size_t k = i; k < re.size(); ++k) {
      if (ctx->bursts[k] == 0.0) continue;
      CHECK(oracle::rel_close(re[k], ctx->allocated[k] + m->extra[k], 1e-9));
    }
    if (ctx->cls == ctx->n_classes()) CHECK(m->extra[i] == extra);
    ++checked;
  }
}

namespace {
struct OneHop {
  NetworkGraph g;
  NodeId a{}, b{};
  OneHop() {
    a = g.add_node("ES1", NodeKind::EndSystem);
    b = g.add_node("ES2", NodeKind::EndSystem);
    g.add_link(a, b, fx::kC);
  }
};
}  // namespace

TEST_CASE("single hop, single class ratio has a closed form", "[adjust]") {
  OneHop h;
  const auto cfg = make_empty_config(h.g, fx::classes(1), {5e-3});
  const std::vector<std::size_t> route{0};
  for (double e2e : {1e-3, 2e-3, 4e-3}) {
    const auto f = fx::flow(1, h.a, h.b, 12144, 2e-3, e2e);
    auto out = adjust_local_deadlines(f, route, cfg);
    REQUIRE(out);
    const double floor = fx::kLmax / fx::kC;
    const double bar = 12144.0 / (5e-3 - floor);
    const double residual = 7.5e7 - bar;
    const double gamma = (12144.0 / (e2e - floor) - bar) / residual;
    CHECK(oracle::rel_close(out->gamma, gamma, 1e-9));
    CHECK(out->slack >= 0.0);
    CHECK(out->slack <= 1e-9 * e2e);
    CHECK(out->converged);
    CHECK(out->iterations <= 64);
  }
}

TEST_CASE("ratio is one when full residual meets the deadline exactly", "[adjust]") {
  auto l = fx::line(2);
  const auto cfg = make_empty_config(l.g, fx::classes(1), {6e-3});
  std::vector<std::size_t> route;
  const auto paths = k_shortest(cfg.graph, l.a, l.b, 1);
  for (const auto& r : paths->front().links) route.push_back(cfg.graph.require_link(r));
  auto f = fx::flow(1, l.a, l.b, 12144, 2e-3, 1.0);
  f.deadline = full_grant_deadline_sum(f, route, cfg);
  auto out = adjust_local_deadlines(f, route, cfg);
  REQUIRE(out);
  CHECK(out->gamma == 1.0);

  f.deadline *= 0.999;
  auto fail = adjust_local_deadlines(f, route, cfg);
  REQUIRE_FALSE(fail);
  CHECK(fail.error().reason == AdjustFailure::Reason::DeadlineUnreachable);
}

TEST_CASE("returned ratio is minimal", "[adjust]") {
  auto l = fx::line(3);
  const auto cfg = make_empty_config(l.g, fx::classes(1), {6e-3});
  std::vector<std::size_t> route;
  const auto paths = k_shortest(cfg.graph, l.a, l.b, 1);
  for (const auto& r : paths->front().links) route.push_back(cfg.graph.require_link(r));
  std::vector<PortAdjustContext> ctxs;
  const auto f = fx::flow(1, l.a, l.b, 8000, 3e-3, 5e-3);
  for (auto r : route) ctxs.push_back(*make_port_context(cfg, r, f));
  std::vector<GammaIteration> trace;
  AdjustOptions opts;
  opts.trace = &trace;
  auto out = adjust_local_deadlines(f, route, cfg, opts);
  REQUIRE(out);
  auto slack = [&](double g) { return f.deadline - detail::map_route(g, ctxs)->sum; };
  CHECK(slack(out->gamma) >= -1e-9 * f.deadline);
  CHECK(slack(out->gamma) <= 1e-9 * f.deadline);
  CHECK(slack(out->gamma * (1 - 1e-8)) < 0.0);
  CHECK(trace.size() == static_cast<std::size_t>(out->iterations) + 1);
}

TEST_CASE("no residual bandwidth fails the adjustment", "[adjust]") {
  OneHop h;
  auto cfg = make_empty_config(h.g, fx::classes(1), {1e-3});
  // Heavy demand: deadline-term allocation alone exceeds the cap.
  const auto f = fx::flow(1, h.a, h.b, 12144 * 6, 2e-3, 5e-4);
  const std::vector<std::size_t> route{0};
  cfg.ports[0][0].burst_sum = 12144.0 * 6;
  cfg.ports[0][0].rate_sum = 1.0;
  auto out = adjust_local_deadlines(f, route, cfg);
  REQUIRE_FALSE(out);
  CHECK(out.error().reason == AdjustFailure::Reason::ResidualExhausted);
}
