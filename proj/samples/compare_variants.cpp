// Runs both label-propagation variants on one random graph and prints the
// per-site predictor statistics side by side.

#include <iostream>

#include <branchlab/analysis.hpp>
#include <branchlab/cc.hpp>
#include <branchlab/graph.hpp>
#include <branchlab/tracer.hpp>

int main() {
  using namespace branchlab;
  const auto g = generate_random(2000, 8000, 42);

  TraceRecorder based_rec, avoiding_rec;
  const auto based = sv_branch_based(g, based_rec);
  const auto avoiding = sv_branch_avoiding(g, avoiding_rec);

  std::cout << "components: " << count_components(based.labels) << ", iterations: " << based.iterations
            << ", labels equal: " << std::boolalpha << (based.labels == avoiding.labels) << "\n\n";
  for (const auto* snap : {&based_rec, &avoiding_rec}) {
    const auto report = snap->report();
    std::cout << (snap == &based_rec ? "branch-based\n" : "branch-avoiding\n");
    write_sites_csv(std::cout, report);
    std::cout << "stores=" << report.totals.stores << " mispredictions=" << report.totals.mispredictions << "\n\n";
  }
  const auto b = sv_bounds(based, g), a = sv_bounds(avoiding, g);
  std::cout << "mispredictions / lower bound: based " << b.ratio_to_lower << ", avoiding " << a.ratio_to_lower
            << '\n';
}
