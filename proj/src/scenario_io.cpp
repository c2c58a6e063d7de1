#include "chebybal/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace chebybal {

namespace {

std::vector<std::string> tokenize(const std::string & line)
{
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while(ss >> tok)
  {
    if(tok[0] == '#')
    {
      break;
    }
    tokens.push_back(tok);
  }
  return tokens;
}

double parseNumber(const std::string & tok, int line, const std::string & field)
{
  try
  {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if(pos != tok.size())
    {
      throw std::invalid_argument(tok);
    }
    return v;
  }
  catch(const std::exception &)
  {
    throw ParseError("expected a number, got '" + tok + "'", line, field);
  }
}

int parseInt(const std::string & tok, int line, const std::string & field)
{
  double v = parseNumber(tok, line, field);
  int i = static_cast<int>(v);
  if(static_cast<double>(i) != v)
  {
    throw ParseError("expected an integer, got '" + tok + "'", line, field);
  }
  return i;
}

void requireArgs(const std::vector<std::string> & t, size_t n, int line)
{
  if(t.size() != n + 1)
  {
    throw ParseError("key expects " + std::to_string(n) + " value(s)", line, t[0]);
  }
}

ContactMode parseMode(const std::string & tok, int line, const std::string & field)
{
  if(tok == "fixed") { return ContactMode::Fixed; }
  if(tok == "sliding") { return ContactMode::Sliding; }
  if(tok == "inactive") { return ContactMode::Inactive; }
  throw ParseError("unknown mode '" + tok + "'", line, field);
}

std::string formatNumber(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

Scenario parseScenario(std::istream & in)
{
  Scenario sc;
  sc.contacts.clear();

  enum class Block { None, Robot, Contact, State };
  Block block = Block::None;
  Contact contact;
  FsmState state;
  bool robotSeen = false;

  std::string line;
  int lineNo = 0;
  while(std::getline(in, line))
  {
    ++lineNo;
    auto t = tokenize(line);
    if(t.empty())
    {
      continue;
    }
    const std::string & key = t[0];

    if(block == Block::None)
    {
      if(key == "robot")
      {
        requireArgs(t, 0, lineNo);
        block = Block::Robot;
        robotSeen = true;
      }
      else if(key == "contact")
      {
        requireArgs(t, 1, lineNo);
        contact = Contact{};
        contact.id = t[1];
        block = Block::Contact;
      }
      else if(key == "state")
      {
        requireArgs(t, 1, lineNo);
        state = FsmState{};
        state.name = t[1];
        block = Block::State;
      }
      else if(key == "tick")
      {
        requireArgs(t, 1, lineNo);
        sc.tick_seconds = parseNumber(t[1], lineNo, key);
      }
      else if(key == "noise")
      {
        requireArgs(t, 1, lineNo);
        sc.noise_sigma = parseNumber(t[1], lineNo, key);
      }
      else if(key == "filter")
      {
        requireArgs(t, 1, lineNo);
        if(t[1] == "paper") { sc.filter = FilterKind::Paper; }
        else if(t[1] == "recursive") { sc.filter = FilterKind::Recursive; }
        else { throw ParseError("unknown filter '" + t[1] + "'", lineNo, key); }
      }
      else if(key == "sign")
      {
        requireArgs(t, 1, lineNo);
        if(t[1] == "paper") { sc.sign = SignConvention::PaperRaw; }
        else if(t[1] == "oppose") { sc.sign = SignConvention::OpposeVelocity; }
        else { throw ParseError("unknown sign convention '" + t[1] + "'", lineNo, key); }
      }
      else
      {
        throw ParseError("unknown key '" + key + "'", lineNo, key);
      }
      continue;
    }

    if(key == "end")
    {
      requireArgs(t, 0, lineNo);
      if(block == Block::Contact)
      {
        for(const auto & c : sc.contacts)
        {
          if(c.id == contact.id)
          {
            throw ParseError("duplicate contact id '" + contact.id + "'", lineNo, "contact");
          }
        }
        sc.contacts.push_back(contact);
      }
      else if(block == Block::State)
      {
        sc.states.push_back(state);
      }
      block = Block::None;
      continue;
    }

    if(block == Block::Robot)
    {
      if(key == "mass")
      {
        requireArgs(t, 1, lineNo);
        sc.robot.mass = parseNumber(t[1], lineNo, key);
      }
      else if(key == "gravity")
      {
        requireArgs(t, 1, lineNo);
        sc.robot.gravity = parseNumber(t[1], lineNo, key);
      }
      else
      {
        throw ParseError("unknown key '" + key + "' in robot block", lineNo, key);
      }
    }
    else if(block == Block::Contact)
    {
      if(key == "position")
      {
        requireArgs(t, 3, lineNo);
        for(int i = 0; i < 3; ++i)
        {
          contact.transform.origin(i) = parseNumber(t[1 + i], lineNo, key);
        }
      }
      else if(key == "rotation")
      {
        if(t.size() >= 2 && t[1] == "identity")
        {
          requireArgs(t, 1, lineNo);
          contact.transform.rotation = Mat3::Identity();
        }
        else if(t.size() >= 2 && t[1] == "axisangle")
        {
          requireArgs(t, 5, lineNo);
          Vec3 axis;
          for(int i = 0; i < 3; ++i)
          {
            axis(i) = parseNumber(t[2 + i], lineNo, key);
          }
          contact.transform.rotation = rotationFromAxisAngle(axis, parseNumber(t[5], lineNo, key));
        }
        else if(t.size() >= 2 && t[1] == "rows")
        {
          requireArgs(t, 10, lineNo);
          Mat3 R;
          for(int i = 0; i < 9; ++i)
          {
            R(i / 3, i % 3) = parseNumber(t[2 + i], lineNo, key);
          }
          contact.transform.rotation = R;
        }
        else
        {
          throw ParseError("rotation expects 'identity', 'axisangle' or 'rows'", lineNo, key);
        }
      }
      else if(key == "mode")
      {
        requireArgs(t, 1, lineNo);
        contact.mode = parseMode(t[1], lineNo, key);
        if(contact.mode == ContactMode::Sliding && !contact.sliding)
        {
          contact.sliding = SlidingSpec{};
        }
      }
      else if(key == "mu")
      {
        requireArgs(t, 1, lineNo);
        contact.limits.mu = parseNumber(t[1], lineNo, key);
      }
      else if(key == "mu_dynamic")
      {
        requireArgs(t, 1, lineNo);
        if(!contact.sliding) { contact.sliding = SlidingSpec{}; }
        contact.sliding->mu_dynamic = parseNumber(t[1], lineNo, key);
      }
      else if(key == "sigma")
      {
        requireArgs(t, 2, lineNo);
        contact.limits.sigma_x = parseNumber(t[1], lineNo, key);
        contact.limits.sigma_y = parseNumber(t[2], lineNo, key);
      }
      else if(key == "fz_bounds")
      {
        requireArgs(t, 2, lineNo);
        contact.limits.fz_min = parseNumber(t[1], lineNo, key);
        contact.limits.fz_max = parseNumber(t[2], lineNo, key);
      }
      else if(key == "tz_bounds")
      {
        requireArgs(t, 2, lineNo);
        contact.limits.tz_min = parseNumber(t[1], lineNo, key);
        contact.limits.tz_max = parseNumber(t[2], lineNo, key);
      }
      else if(key == "velocity")
      {
        requireArgs(t, 2, lineNo);
        if(!contact.sliding) { contact.sliding = SlidingSpec{}; }
        contact.sliding->velocity_tangent.x() = parseNumber(t[1], lineNo, key);
        contact.sliding->velocity_tangent.y() = parseNumber(t[2], lineNo, key);
      }
      else if(key == "fz_des")
      {
        requireArgs(t, 1, lineNo);
        if(!contact.sliding) { contact.sliding = SlidingSpec{}; }
        contact.sliding->fz_des = parseNumber(t[1], lineNo, key);
      }
      else
      {
        throw ParseError("unknown key '" + key + "' in contact block", lineNo, key);
      }
    }
    else if(block == Block::State)
    {
      if(key == "duration")
      {
        requireArgs(t, 1, lineNo);
        state.duration_ticks = parseInt(t[1], lineNo, key);
      }
      else if(key == "mode")
      {
        requireArgs(t, 2, lineNo);
        state.contact_modes[t[1]] = parseMode(t[2], lineNo, key);
      }
      else if(key == "com_target")
      {
        requireArgs(t, 3, lineNo);
        Vec3 c;
        for(int i = 0; i < 3; ++i)
        {
          c(i) = parseNumber(t[1 + i], lineNo, key);
        }
        state.com_target = c;
      }
      else if(key == "force")
      {
        requireArgs(t, 2, lineNo);
        state.force_targets[t[1]] = parseNumber(t[2], lineNo, key);
      }
      else if(key == "path")
      {
        if(t.size() < 3)
        {
          throw ParseError("path expects '<id> circle|line ...'", lineNo, key);
        }
        SlidingPath path;
        if(t[2] == "circle")
        {
          requireArgs(t, 4, lineNo);
          path.kind = SlidingPath::Kind::Circle;
          path.radius = parseNumber(t[3], lineNo, key);
          path.period_ticks = parseInt(t[4], lineNo, key);
        }
        else if(t[2] == "line")
        {
          requireArgs(t, 6, lineNo);
          path.kind = SlidingPath::Kind::Line;
          path.radius = parseNumber(t[3], lineNo, key);
          path.period_ticks = parseInt(t[4], lineNo, key);
          path.line_dir.x() = parseNumber(t[5], lineNo, key);
          path.line_dir.y() = parseNumber(t[6], lineNo, key);
        }
        else
        {
          throw ParseError("unknown path kind '" + t[2] + "'", lineNo, key);
        }
        state.sliding_paths[t[1]] = path;
      }
      else
      {
        throw ParseError("unknown key '" + key + "' in state block", lineNo, key);
      }
    }
  }
  if(block != Block::None)
  {
    throw ParseError("unterminated block at end of file", lineNo, "end");
  }
  if(!robotSeen)
  {
    throw ParseError("missing robot block", lineNo, "robot");
  }
  return sc;
}

Scenario parseScenarioFile(const std::string & path)
{
  std::ifstream in(path);
  if(!in)
  {
    throw Error("cannot open scenario file '" + path + "'");
  }
  return parseScenario(in);
}

Scenario parseScenarioString(const std::string & text)
{
  std::istringstream in(text);
  return parseScenario(in);
}

std::string serializeScenario(const Scenario & sc)
{
  std::ostringstream out;
  out << "robot\n";
  out << "  mass " << formatNumber(sc.robot.mass) << "\n";
  out << "  gravity " << formatNumber(sc.robot.gravity) << "\n";
  out << "end\n\n";
  out << "tick " << formatNumber(sc.tick_seconds) << "\n";
  out << "noise " << formatNumber(sc.noise_sigma) << "\n";
  out << "filter " << (sc.filter == FilterKind::Paper ? "paper" : "recursive") << "\n";
  out << "sign " << (sc.sign == SignConvention::PaperRaw ? "paper" : "oppose") << "\n";

  for(const auto & c : sc.contacts)
  {
    out << "\ncontact " << c.id << "\n";
    out << "  position";
    for(int i = 0; i < 3; ++i)
    {
      out << " " << formatNumber(c.transform.origin(i));
    }
    out << "\n  rotation rows";
    for(int i = 0; i < 9; ++i)
    {
      out << " " << formatNumber(c.transform.rotation(i / 3, i % 3));
    }
    out << "\n";
    const char * mode = c.mode == ContactMode::Fixed     ? "fixed"
                        : c.mode == ContactMode::Sliding ? "sliding"
                                                         : "inactive";
    out << "  mode " << mode << "\n";
    out << "  mu " << formatNumber(c.limits.mu) << "\n";
    out << "  sigma " << formatNumber(c.limits.sigma_x) << " " << formatNumber(c.limits.sigma_y)
        << "\n";
    out << "  fz_bounds " << formatNumber(c.limits.fz_min) << " " << formatNumber(c.limits.fz_max)
        << "\n";
    out << "  tz_bounds " << formatNumber(c.limits.tz_min) << " " << formatNumber(c.limits.tz_max)
        << "\n";
    if(c.sliding)
    {
      out << "  mu_dynamic " << formatNumber(c.sliding->mu_dynamic) << "\n";
      out << "  fz_des " << formatNumber(c.sliding->fz_des) << "\n";
      out << "  velocity " << formatNumber(c.sliding->velocity_tangent.x()) << " "
          << formatNumber(c.sliding->velocity_tangent.y()) << "\n";
    }
    out << "end\n";
  }

  for(const auto & s : sc.states)
  {
    out << "\nstate " << s.name << "\n";
    out << "  duration " << s.duration_ticks << "\n";
    for(const auto & [id, m] : s.contact_modes)
    {
      const char * mode = m == ContactMode::Fixed     ? "fixed"
                          : m == ContactMode::Sliding ? "sliding"
                                                      : "inactive";
      out << "  mode " << id << " " << mode << "\n";
    }
    if(s.com_target)
    {
      out << "  com_target";
      for(int i = 0; i < 3; ++i)
      {
        out << " " << formatNumber((*s.com_target)(i));
      }
      out << "\n";
    }
    for(const auto & [id, f] : s.force_targets)
    {
      out << "  force " << id << " " << formatNumber(f) << "\n";
    }
    for(const auto & [id, p] : s.sliding_paths)
    {
      if(p.kind == SlidingPath::Kind::Circle)
      {
        out << "  path " << id << " circle " << formatNumber(p.radius) << " " << p.period_ticks
            << "\n";
      }
      else
      {
        out << "  path " << id << " line " << formatNumber(p.radius) << " " << p.period_ticks
            << " " << formatNumber(p.line_dir.x()) << " " << formatNumber(p.line_dir.y()) << "\n";
      }
    }
    out << "end\n";
  }
  return out.str();
}

} // namespace chebybal
