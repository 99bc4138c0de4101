// Writes the bundled synthetic typed-KG dataset (train/dev/test + text files).
#include <iostream>

#include "CLI11.hpp"
#include "star/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic typed knowledge-graph generator"};
  star::synth::SynthSpec spec;
  std::string out_dir = "data/umls_like";
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--entities", spec.n_entities);
  app.add_option("--relations", spec.n_relations);
  app.add_option("--types", spec.n_types);
  app.add_option("--train", spec.n_train);
  app.add_option("--dev", spec.n_dev);
  app.add_option("--test", spec.n_test);
  app.add_option("--seed", spec.seed);
  CLI11_PARSE(app, argc, argv);

  try {
    star::synth::SynthFiles files = star::synth::write_dataset(spec, out_dir);
    std::cout << "wrote " << files.train << ", " << files.dev << ", "
              << files.test << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
