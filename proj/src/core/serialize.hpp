#pragma once

#include <string>

#include "core/dataset.hpp"
#include "core/models.hpp"
#include "core/neuralize.hpp"

namespace distex {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

uint64_t fnv1a_hash(const std::string& bytes);
uint64_t hash_file(const std::string& path);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// One-way inspection dump; the net is reconstructed from its source model.
std::string net_to_json(const NeuralizedNet& net);

std::string normalization_to_json(const Normalization& norm);
Normalization normalization_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace distex
