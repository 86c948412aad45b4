#include "stereoct/pipeline.hpp"

namespace stereoct {

Descriptor parse_descriptor(const std::string& name) {
  if (name == "census") return Descriptor::census_hard;
  if (name == "census-soft") return Descriptor::census_soft;
  if (name == "sad") return Descriptor::sad;
  throw std::invalid_argument("unknown descriptor: " + name +
                              " (expected census, census-soft, or sad)");
}

const char* descriptor_name(Descriptor d) {
  switch (d) {
    case Descriptor::census_hard: return "census";
    case Descriptor::census_soft: return "census-soft";
    case Descriptor::sad: return "sad";
  }
  return "?";
}

}  // namespace stereoct
