// Runs the pipeline on a corpus and prints each cluster's quadrant and
// most frequent members.
//
//   coword_sample data/fixture_corpus.csv [clusters]

#include <cstdio>
#include <iostream>
#include <string>

#include "coword/report.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " corpus.csv [clusters]\n";
    return 2;
  }
  try {
    const auto corpus = coword::canonicalize_corpus(coword::read_corpus_file(argv[1]));
    coword::AnalysisConfig config;
    config.min_occurrence = 3;
    config.clusters = argc > 2 ? std::stoul(argv[2]) : 5;
    config.excluded = {"visualization"};
    const auto s = coword::run_pipeline(corpus, config);

    std::printf("median centrality %.4f, median density %.4f\n", s.strategic.median_centrality,
                s.strategic.median_density);
    for (const auto& p : s.strategic.points) {
      std::printf("%3d %-4s c=%.4f d=%.4f ", p.cluster, coword::to_string(p.quadrant).c_str(), p.centrality,
                  p.density);
      const auto members = s.members_by_frequency(p.cluster);
      for (std::size_t i = 0; i < members.size() && i < 4; ++i) std::printf("%s%s", i ? ", " : "", members[i].c_str());
      std::printf("\n");
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
