#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ecsim/analysis.hpp"
#include "ecsim/protocol_circuit.hpp"
#include "ecsim/state.hpp"
#include "oracles.hpp"

using namespace ecsim;

namespace {

SchmidtForm bell_at(double alpha_sq) {
  return catalog_state(CatalogId::bell(), std::sqrt(alpha_sq));
}

const BranchNode* find_node(const BranchTree& tree, const std::string& label) {
  for (const auto& n : tree.nodes) {
    if (n.label == label) return &n;
  }
  return nullptr;
}

// Sum of leaf probabilities at a depth cut: success nodes above the cut plus
// the deepest surviving failure node (or the root).
double leaf_probability_sum(const BranchTree& tree, int depth) {
  double total = 0.0;
  const BranchNode* continuing = nullptr;
  for (const auto& n : tree.nodes) {
    if (n.depth > depth) continue;
    if (n.label.rfind("success@", 0) == 0) {
      total += n.probability;
    } else if (continuing == nullptr || n.depth > continuing->depth) {
      continuing = &n;
    }
  }
  REQUIRE(continuing != nullptr);
  return total + continuing->probability;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("espp measures the smaller squared coefficient") {
    CHECK(espp(assemble(bell_at(0.8)), 1) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(espp(assemble(bell_at(0.3)), 1) == doctest::Approx(0.6).epsilon(1e-12));
    const SchmidtForm mes(1.0 / std::sqrt(2.0), basis_state(1, 0), basis_state(1, 1));
    CHECK(espp(assemble(mes), 1) == doctest::Approx(1.0).epsilon(1e-12));
    // a product state has nothing to concentrate
    CHECK(espp(tensor(basis_state(1, 0), basis_state(1, 1)), 1) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("espp rejects states with three Schmidt terms") {
    const double r3 = 1.0 / std::sqrt(3.0);
    std::vector<Amplitude> amps(16, Amplitude{0.0, 0.0});
    amps[0b0011] = Amplitude{r3, 0.0};
    amps[0b0101] = Amplitude{r3, 0.0};
    amps[0b1010] = Amplitude{r3, 0.0};
    const PureState w = make_pure_state(4, std::move(amps));
    CHECK_THROWS_AS(espp(w, 2), NotBellType);
  }

  TEST_CASE("series_total reproduces the frozen checkpoints") {
    const double alpha = std::sqrt(0.8);
    CHECK(series_total(alpha, 1) == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(series_total(alpha, 2) == doctest::Approx(0.3952941176470588).epsilon(1e-12));
    CHECK(std::abs(series_total(alpha, 30) - 0.4) <= 1e-6);
    CHECK(std::abs(series_total(std::sqrt(0.3), 30) - 0.6) <= 1e-6);
  }

  TEST_CASE("series_total validates its arguments") {
    CHECK_THROWS_AS(series_total(0.0, 5), OutOfRange);
    CHECK_THROWS_AS(series_total(1.0, 5), OutOfRange);
    CHECK_THROWS_AS(series_total(1.0 / std::sqrt(2.0), 5), OutOfRange);
    CHECK_THROWS_AS(series_total(std::sqrt(0.8), 0), OutOfRange);
  }

  TEST_CASE("the coefficient recurrence and the state simulation agree") {
    for (const double a2 : oracles::alpha_sq_grid()) {
      const auto records = iterate(bell_at(a2), 30);
      for (const auto& rec : records) {
        CHECK(std::abs(rec.cumulative_success - series_total(std::sqrt(a2), rec.round)) <= 1e-12);
      }
    }
  }

  TEST_CASE("branch tree carries unconditional probabilities") {
    const BranchTree tree = build_branch_tree(bell_at(0.8), 3, TreeProtocol::Circuit);
    CHECK(tree.max_depth == 3);

    const auto* root = find_node(tree, "root");
    REQUIRE(root != nullptr);
    CHECK(root->probability == doctest::Approx(1.0));
    CHECK_FALSE(root->terminal);

    const auto* s1 = find_node(tree, "success@1");
    REQUIRE(s1 != nullptr);
    CHECK(s1->probability == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(s1->terminal);

    const auto* f1 = find_node(tree, "fail@1");
    REQUIRE(f1 != nullptr);
    CHECK(f1->probability == doctest::Approx(0.68).epsilon(1e-12));
    CHECK_FALSE(f1->terminal);

    const auto* s2 = find_node(tree, "success@2");
    REQUIRE(s2 != nullptr);
    CHECK(s2->probability == doctest::Approx(0.07529411764705882).epsilon(1e-12));

    const auto* f3 = find_node(tree, "fail@3");
    REQUIRE(f3 != nullptr);
    CHECK(f3->terminal);

    for (int d = 0; d <= 3; ++d) {
      CHECK(leaf_probability_sum(tree, d) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("deep trees saturate instead of losing probability") {
    // At alpha^2 = 0.95 the success weight drops under the pruning floor
    // after a handful of rounds; the tree must stop branching yet keep its
    // cuts complete all the way to the requested depth.
    const BranchTree tree = build_branch_tree(bell_at(0.95), 8, TreeProtocol::Circuit);
    CHECK(tree.max_depth == 8);
    CHECK(find_node(tree, "success@8") == nullptr);
    for (int d = 0; d <= 8; ++d) {
      CHECK(leaf_probability_sum(tree, d) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("average espp is conserved along the tree") {
    for (const auto protocol : {TreeProtocol::Circuit, TreeProtocol::Qnd}) {
      const BranchTree tree = build_branch_tree(bell_at(0.8), 8, protocol);
      for (int d = 0; d <= 8; ++d) {
        CHECK(std::abs(average_espp(tree, d) - 0.4) <= 1e-12);
      }
    }
    // and for a structured multi-qubit pair
    const SchmidtForm q5 = catalog_state(CatalogId::q5(), std::sqrt(0.65));
    const BranchTree tree = build_branch_tree(q5, 6, TreeProtocol::Circuit);
    for (int d = 0; d <= 6; ++d) {
      CHECK(std::abs(average_espp(tree, d) - 0.7) <= 1e-12);
    }
  }

  TEST_CASE("average_espp validates the requested depth") {
    const BranchTree tree = build_branch_tree(bell_at(0.8), 2, TreeProtocol::Circuit);
    CHECK_THROWS_AS(average_espp(tree, 3), DepthExceedsTree);
    CHECK_THROWS_AS(average_espp(tree, -1), OutOfRange);
    CHECK_THROWS_AS(build_branch_tree(bell_at(0.8), -1, TreeProtocol::Circuit), OutOfRange);
  }

  TEST_CASE("circuit and qnd trees coincide node by node") {
    const BranchTree circuit = build_branch_tree(bell_at(0.7), 4, TreeProtocol::Circuit);
    const BranchTree qnd = build_branch_tree(bell_at(0.7), 4, TreeProtocol::Qnd);
    REQUIRE(circuit.nodes.size() == qnd.nodes.size());
    for (std::size_t i = 0; i < circuit.nodes.size(); ++i) {
      CHECK(circuit.nodes[i].label == qnd.nodes[i].label);
      CHECK(std::abs(circuit.nodes[i].probability - qnd.nodes[i].probability) <= 1e-12);
      CHECK(max_abs_diff(circuit.nodes[i].state, qnd.nodes[i].state) <= 1e-12);
    }
  }

  TEST_CASE("a depth-zero tree is just the root") {
    const BranchTree tree = build_branch_tree(bell_at(0.8), 0, TreeProtocol::Circuit);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].terminal);
    CHECK(average_espp(tree, 0) == doctest::Approx(0.4).epsilon(1e-12));
  }
}
