/*
 * Copyright 2026 The ppac Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ppac: run confidential average-consensus experiments.
//
// Exit status: 0 when the run converged, 2 when it did not (budget exhausted
// or diverged), 1 on any error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppac/adversary.h"
#include "ppac/errors.h"
#include "ppac/experiment.h"

namespace {

using ppac::ExperimentConfig;
using ppac::ExperimentResult;

int ExitCode(const ExperimentResult& result) {
  return result.outcome == ppac::Outcome::kConverged ? 0 : 2;
}

void Report(const ExperimentConfig& config, const ExperimentResult& result) {
  std::printf("outcome: %s after %zu rounds\n", std::string(OutcomeName(result.outcome)).c_str(),
              result.rounds);
  std::printf("initial mean: %.12g\n", result.initial_mean);
  std::printf("final mean: %.12g  disagreement: %.6g\n", result.final_mean,
              result.final_disagreement);
  std::printf("final states:");
  for (double x : result.final_states) std::printf(" %.6f", x);
  std::printf("\n");
  std::printf("interactions: %zu  rejected: %zu  retransmissions: %zu  dropped edges: %zu\n",
              result.interactions, result.rejected_packets, result.retransmissions,
              result.dropped_edges);
  std::printf("latency per interaction: %.3f ms\n", result.seconds_per_interaction * 1e3);
  if (result.inferred_state) {
    std::printf("inferred x_%u[0] = %.9f (true %.9f)\n", config.adversary.target,
                *result.inferred_state, *result.true_state);
  }
  if (config.adversary.kind == ppac::AdversaryKind::kEavesdrop) {
    if (result.witness) {
      std::printf("alternative explanation: delta %.4g, residual %.3g\n", result.witness->delta,
                  result.witness->max_residual);
    } else if (config.initial_states.size() == 3) {
      std::printf("no alternative explanation found\n");
    }
  }
  if (config.adversary.kind == ppac::AdversaryKind::kInject) {
    std::printf("injections: %zu  mean shift: %.9g\n", result.injections.size(),
                result.final_mean - result.initial_mean);
    if (result.predicted_mean) {
      std::printf("predicted mean: %.9g\n", *result.predicted_mean);
    }
  }
  if (!config.output.empty()) std::printf("artifacts: %s\n", config.output.c_str());
}

int Execute(const ExperimentConfig& config) {
  ExperimentResult result = ppac::RunExperiment(config);
  ppac::WriteArtifacts(config, result);
  Report(config, result);
  return ExitCode(result);
}

int KeygenBench(const std::vector<int>& bits, int count, uint64_t seed) {
  ppac::Rng rng(seed);
  for (int b : bits) {
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < count; ++i) ppac::GenerateKeyPair(b, rng);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%5d bits: %.2f ms per key pair (%d pairs)\n", b, seconds * 1e3 / count, count);
  }
  return 0;
}

ExperimentConfig AttackConfig(const std::string& scenario, uint64_t seed, bool signatures,
                              int key_bits) {
  ExperimentConfig c;
  c.key_bits = key_bits;
  c.seed = seed;
  c.params.epsilon = 0.4;
  c.params.a_bar = 0.9;
  c.signatures = signatures;
  if (scenario == "infer") {
    // Alice (1) hangs off Eve (0) alone.
    c.initial_states = {1.0, 5.0};
    c.topology.kind = "line";
    c.adversary.kind = ppac::AdversaryKind::kIsolate;
    c.adversary.observer = 0;
    c.adversary.target = 1;
    c.stop_threshold = 1e-6;
  } else if (scenario == "witness") {
    c.initial_states = {1.0, 5.0, 3.0};
    c.topology.kind = "complete";
    c.params.epsilon = 0.3;
    c.adversary.kind = ppac::AdversaryKind::kEavesdrop;
    c.adversary.observer = 0;
    c.stop_threshold = 1e-3;
  } else if (scenario == "inject") {
    c.initial_states = {0.0, 20.0};
    c.topology.kind = "line";
    c.adversary.kind = ppac::AdversaryKind::kInject;
    c.adversary.target = 0;
    c.adversary.xi = 10;
    c.adversary.rounds = {0};
    c.stop_threshold = 1e-3;
    c.max_rounds = 500;
  } else {
    throw ppac::ConfigError("unknown attack scenario '" + scenario + "'");
  }
  return c;
}

int Forge(uint64_t seed) {
  ppac::Rng rng(seed);
  const ppac::Bytes cert = {'n', 'o', 'd', 'e', '-', '0'};
  const ppac::Bytes original = {'r', 'o', 'u', 'n', 'd', ' ', '0'};
  const ppac::Bytes forged_payload = {'r', 'o', 'u', 'n', 'd', ' ', '9'};

  ppac::PaillierLiteralScheme literal(512);
  ppac::SigningKey key = literal.GenerateKey(rng);
  auto envelope = ppac::Sign(literal, key, original, cert, rng);
  auto forged = ppac::ForgePaillierLiteral(envelope, forged_payload, rng);
  auto verdict = ppac::Verify(literal, forged, std::span<const uint8_t>(key.verify_key));
  std::printf("paillier-literal forgery with the pinned key: %s\n",
              std::string(ppac::VerdictName(verdict)).c_str());

  ppac::RsaSignatureScheme rsa(1024);
  ppac::SigningKey rsa_key = rsa.GenerateKey(rng);
  auto rsa_envelope = ppac::Sign(rsa, rsa_key, original, cert, rng);
  auto substituted = ppac::ForgeWithSubstitutedKey(rsa, rsa_envelope, forged_payload, rng);
  std::printf("rsa key substitution, key from the wire: %s\n",
              std::string(ppac::VerdictName(ppac::Verify(rsa, substituted, std::nullopt))).c_str());
  std::printf("rsa key substitution, pinned key: %s\n",
              std::string(ppac::VerdictName(ppac::Verify(
                              rsa, substituted, std::span<const uint8_t>(rsa_key.verify_key))))
                  .c_str());
  rsa_envelope.payload = forged_payload;
  std::printf("rsa payload swap: %s\n",
              std::string(ppac::VerdictName(ppac::Verify(
                              rsa, rsa_envelope, std::span<const uint8_t>(rsa_key.verify_key))))
                  .c_str());
  return verdict == ppac::Verdict::kAccept ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidential average consensus with Paillier-encrypted exchanges"};
  app.require_subcommand(1);

  std::string config_path;
  uint64_t seed = 0;
  std::string output;
  bool allow_unstable = false;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "RNG seed; overrides the config")->required();
  run->add_option("--output", output, "Artifact directory; overrides the config");
  run->add_flag("--allow-unstable", allow_unstable,
                "Skip the epsilon and a_bar stability checks");

  auto* preset = app.add_subcommand("preset", "Run a canned scenario");
  std::string preset_name;
  std::string preset_transport = "simulated";
  preset->add_option("name", preset_name, "Scenario name")
      ->required()
      ->check(CLI::IsMember({"six_node", "fig4"}));
  preset->add_option("--seed", seed, "RNG seed");
  preset->add_option("--output", output, "Artifact directory");
  preset->add_option("--transport", preset_transport, "simulated or socket")
      ->check(CLI::IsMember({"simulated", "socket"}));

  auto* bench = app.add_subcommand("keygen-bench", "Time Paillier key generation");
  std::vector<int> bits = {256, 512, 1024};
  int count = 3;
  bench->add_option("--bits", bits, "Modulus sizes")->delimiter(',');
  bench->add_option("--count", count, "Key pairs per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "RNG seed");

  auto* attack = app.add_subcommand("attack", "Adversary scenarios");
  std::string scenario;
  bool signatures = false;
  int key_bits = 256;
  attack->add_option("scenario", scenario, "infer, witness, inject or forge")
      ->required()
      ->check(CLI::IsMember({"infer", "witness", "inject", "forge"}));
  attack->add_option("--seed", seed, "RNG seed");
  attack->add_option("--output", output, "Artifact directory");
  attack->add_flag("--signatures", signatures, "Sign every packet (inject)");
  attack->add_option("--key-bits", key_bits, "Paillier modulus size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help exits cleanly
  }

  try {
    if (*run) {
      ExperimentConfig config = ppac::LoadConfig(config_path);
      config.seed = seed;
      if (!output.empty()) config.output = output;
      if (allow_unstable) config.allow_unstable = true;
      return Execute(config);
    }
    if (*preset) {
      ExperimentConfig config = ppac::PresetSixNode();
      config.seed = seed;
      config.output = output;
      if (preset_transport == "socket") config.transport = ppac::TransportKind::kSocket;
      return Execute(config);
    }
    if (*bench) return KeygenBench(bits, count, seed);
    if (*attack) {
      if (scenario == "forge") return Forge(seed);
      ExperimentConfig config = AttackConfig(scenario, seed, signatures, key_bits);
      config.output = output;
      return Execute(config);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
