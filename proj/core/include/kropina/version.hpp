#pragma once

namespace kropina {

const char* version_string();

}  // namespace kropina
