#pragma once

#include <iosfwd>
#include <string>

#include "chebybal/harness.hpp"

namespace chebybal {

// Line-oriented scenario/stance format. `robot`, `contact <id>` and
// `state <name>` open blocks closed by `end`; `tick` and `noise` are
// top-level single-line settings. `#` starts a comment. A stance is a
// scenario without states. Unknown keys raise ParseError naming the key.
Scenario parseScenario(std::istream & in);
Scenario parseScenarioFile(const std::string & path);
Scenario parseScenarioString(const std::string & text);

std::string serializeScenario(const Scenario & scenario);

} // namespace chebybal
