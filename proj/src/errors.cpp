#include "schedrate/errors.hpp"

namespace schedrate {

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error([&] {
        std::string joined;
        for (const auto& m : messages) {
          if (!joined.empty()) joined += "; ";
          joined += m;
        }
        return joined.empty() ? std::string("invalid configuration") : joined;
      }()),
      messages_(std::move(messages)) {}

}  // namespace schedrate
