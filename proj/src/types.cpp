#include "engage/types.hpp"

#include "engage/errors.hpp"

namespace engage {

EventField event_field_from_name(const std::string& name) {
  if (name == "event_context") return EventField::EventContext;
  if (name == "component") return EventField::Component;
  if (name == "event_name") return EventField::EventName;
  if (name == "description") return EventField::Description;
  throw ConfigError("unknown event field \"" + name +
                    "\" (expected event_context, component, event_name or description)");
}

std::string event_field_name(EventField field) {
  switch (field) {
    case EventField::EventContext: return "event_context";
    case EventField::Component: return "component";
    case EventField::EventName: return "event_name";
    case EventField::Description: return "description";
  }
  return "event_context";
}

const std::string& field_value(const LogEvent& event, EventField field) {
  switch (field) {
    case EventField::EventContext: return event.event_context;
    case EventField::Component: return event.component;
    case EventField::EventName: return event.event_name;
    case EventField::Description: return event.description;
  }
  return event.event_context;
}

std::string activity_key(const LogEvent& event, std::span<const EventField> columns) {
  std::string key;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) key += '\x1f';
    key += field_value(event, columns[i]);
  }
  return key;
}

}  // namespace engage
