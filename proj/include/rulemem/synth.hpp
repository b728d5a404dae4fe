#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rulemem/dataset.hpp"
#include "rulemem/term.hpp"

namespace rulemem {

// Seeded relation-chain instances: depth-d chains of fresh relations with
// composition rules, shuffled and padded with non-firing distractor rules.
// Gold is the final composed relation, known by construction.
struct KinshipSynthConfig {
    int count = 20;
    int min_depth = 2;
    int max_depth = 6;
    int distractor_rules = 2;
    std::uint64_t seed = 1;
};

std::vector<InstanceSpec> generate_kinship(const KinshipSynthConfig& config);

// Seeded box-world instances with put/remove/move operation sequences.
struct BoxesSynthConfig {
    int count = 20;
    int operations = 7;
    int boxes = 4;
    std::uint64_t seed = 1;
};

std::vector<InstanceSpec> generate_boxes(const BoxesSynthConfig& config);

// Reference simulator: applies the operations to the initial states and
// returns each box's final contents. Kept separate from the engine path so
// the two can be checked against each other.
std::map<std::string, std::vector<std::string>> simulate_boxes(const std::vector<Atom>& states,
                                                               const std::vector<Atom>& ops);

std::string box_contents_text(const std::vector<std::string>& items);

}  // namespace rulemem
