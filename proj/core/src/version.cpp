#include "kropina/version.hpp"

namespace kropina {

const char* version_string() { return "0.1.0"; }

}  // namespace kropina
