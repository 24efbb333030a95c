#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace litter::testing {

inline constexpr std::size_t kTacoImages = 1500;
inline constexpr std::size_t kTacoAnnotations = 4784;
inline constexpr std::size_t kTacoCategories = 60;

inline const std::vector<std::string>& taco_supercategories() {
  static const std::vector<std::string> names{
      "Plastic bag & wrapper", "Cigarette", "Bottle", "Bottle cap", "Can", "Other plastic", "Carton",
      "Cup", "Straw", "Paper", "Broken glass", "Styrofoam piece", "Pop tab", "Lid",
      "Plastic container", "Aluminium foil", "Plastic utensils", "Rope & strings", "Paper bag",
      "Scrap metal", "Food waste", "Squeezable tube", "Shoe", "Blister pack", "Glass jar",
      "Plastic glooves", "Battery", "Unlabeled litter"};
  return names;
}

// Annotation count per supercategory (same order as the names): a strictly
// decreasing heavy-tailed profile summing to 4784.
inline std::vector<std::size_t> taco_supercategory_counts() {
  const auto& names = taco_supercategories();
  std::vector<double> w(names.size());
  double sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] = 1.0 / std::pow(static_cast<double>(i) + 1.5, 1.3);
  std::vector<std::size_t> counts(w.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) assigned += counts[i] = 8 + static_cast<std::size_t>(w[i] / sum * 4400);
  counts[0] += kTacoAnnotations - assigned;
  return counts;
}

// COCO document shaped like the public litter dataset: 1500 images, 4784
// annotations over 60 categories in 28 supercategories.
inline nlohmann::json taco_like_document(unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  const auto& supers = taco_supercategories();
  const auto counts = taco_supercategory_counts();

  nlohmann::json doc;
  doc["images"] = nlohmann::json::array();
  for (std::size_t i = 0; i < kTacoImages; ++i)
    doc["images"].push_back({{"id", i + 1}, {"file_name", "batch_" + std::to_string(i / 100 + 1) + "/" +
                                                             std::to_string(i % 100) + ".jpg"},
                             {"width", 3024}, {"height", 4032}});

  // The first four supercategories get three categories each, the rest two.
  std::vector<std::vector<int>> cats_of(supers.size());
  doc["categories"] = nlohmann::json::array();
  int next_cat = 0;
  for (std::size_t s = 0; s < supers.size(); ++s) {
    const int n = s < 4 ? 3 : 2;
    for (int j = 0; j < n; ++j) {
      cats_of[s].push_back(next_cat);
      doc["categories"].push_back(
          {{"id", next_cat}, {"name", supers[s] + " type " + std::to_string(j + 1)}, {"supercategory", supers[s]}});
      ++next_cat;
    }
  }

  doc["annotations"] = nlohmann::json::array();
  std::size_t ann = 1;
  std::uniform_int_distribution<std::size_t> pick_image(1, kTacoImages);
  for (std::size_t s = 0; s < supers.size(); ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k) {
      const int cat = cats_of[s][k % cats_of[s].size()];
      const double x = static_cast<double>(rng() % 2500);
      const double y = static_cast<double>(rng() % 3500);
      doc["annotations"].push_back({{"id", ann++},
                                    {"image_id", pick_image(rng)},
                                    {"category_id", cat},
                                    {"bbox", {x, y, 40 + static_cast<double>(rng() % 400),
                                              40 + static_cast<double>(rng() % 400)}},
                                    {"area", 1000.0},
                                    {"iscrowd", 0}});
    }
  }
  return doc;
}

}  // namespace litter::testing
