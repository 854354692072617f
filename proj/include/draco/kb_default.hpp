#pragma once

// The shipped knowledge base, one string per role file.

namespace draco::default_kb {

inline constexpr const char* definitions = R"lp(%% kinds
% Entity kinds a chart may contain.
kind((view;mark;encoding;scale;facet;field;task)).

%% domains
% Values each assignable property may take. `none` stands for an absent
% optional property. Channel set and task values are our choice.
domain((mark,type),(point;bar;line;area;text;tick;rect)).
domain((encoding,channel),(x;y;color;size;shape;text)).
domain((encoding,aggregate),(count;mean;sum;min;max;none)).
domain((encoding,binning),(10;none)).
domain((encoding,stack),(zero;normalize;none)).
domain((scale,channel),(x;y;color;size;shape;text)).
domain((scale,type),(linear;log;ordinal;categorical)).
domain((facet,channel),(col;row)).
domain((view,coordinates),(cartesian;polar)).
domain((field,type),(number;string;boolean;datetime)).
domain(task,(value;summary;none)).

%% field_domains
% Encodings and facets may reference any field of the data schema.
domain((encoding,field),N) :- attribute((field,name),_,N).
domain((encoding,field),none).
domain((facet,field),N) :- attribute((field,name),_,N).

%% required
% Properties every entity of a kind must carry.
required((mark,type)).
required((encoding,channel)).
required((scale,channel)).
required((scale,type)).
required((facet,channel)).
required((facet,field)).
required((field,type)).

%% optional
% Properties the generator fills in, possibly with `none`.
optional((encoding,field)).
optional((encoding,aggregate)).
optional((encoding,binning)).
optional((encoding,stack)).
optional_root(task).

%% completeness
% An entity lacking a required property is incomplete.
assigned(P,E) :- attribute(P,E,_).
missing((N,A),E) :- entity(N,_,E), required((N,A)), not assigned((N,A),E).

%% helpers
% Shorthands shared by the hard and soft programs.
mark_type(M,T) :- attribute((mark,type),M,T).
channel(E,C) :- attribute((encoding,channel),E,C).
field_of(E,F) :- attribute((encoding,field),E,F), F != none.
aggregate(E,A) :- attribute((encoding,aggregate),E,A), A != none.
aggregated(E) :- aggregate(E,_).
binned(E) :- attribute((encoding,binning),E,B), B != none.
stacked(E,S) :- attribute((encoding,stack),E,S), S != none.
field_name(F) :- attribute((field,name),_,F).
field_type(F,T) :- attribute((field,name),I,F), attribute((field,type),I,T).
field_unique(F,U) :- attribute((field,name),I,F), attribute((field,unique),I,U).
enc_mark(E,M) :- entity(encoding,M,E).
mark_view(M,V) :- entity(mark,V,M).
enc_type(E,T) :- field_of(E,F), field_type(F,T).
has_scale(V,C) :- entity(scale,V,S), attribute((scale,channel),S,C).
scale_of(V,C,T) :- entity(scale,V,S), attribute((scale,channel),S,C), attribute((scale,type),S,T).
enc_scale(E,T) :- enc_mark(E,M), mark_view(M,V), channel(E,C), scale_of(V,C,T).
view_channel(V,C) :- enc_mark(E,M), mark_view(M,V), channel(E,C).
has_channel(M,C) :- enc_mark(E,M), channel(E,C).
positional((x;y)).
discrete_scale((ordinal;categorical)).
continuous_scale((linear;log)).
has_positional(M) :- has_channel(M,C), positional(C).
has_continuous_position(M) :- enc_mark(E,M), channel(E,C), positional(C), enc_scale(E,T), continuous_scale(T).
has_encoding(M) :- enc_mark(_,M).
mark_aggregated(M) :- enc_mark(E,M), aggregated(E).
grouped(M) :- enc_mark(E,M), field_of(E,_), not aggregated(E).
task(T) :- attribute(task,root,T), T != none.
polar(V) :- attribute((view,coordinates),V,polar).
)lp";

inline constexpr const char* generate = R"lp(%% assign_required
% Every entity takes exactly one value for each required property.
{ attribute((N,A),E,V): domain((N,A),V) } = 1 :- entity(N,_,E), required((N,A)).

%% assign_optional
% Optional properties take exactly one value too, possibly `none`.
{ attribute((N,A),E,V): domain((N,A),V) } = 1 :- entity(N,_,E), optional((N,A)).

%% assign_root
% Properties of the chart as a whole, such as the task.
{ attribute(A,root,V): domain(A,V) } = 1 :- optional_root(A).
)lp";

inline constexpr const char* constraints = R"lp(%% entity_parents
% Every entity hangs off an entity of the kind it belongs to.
:- entity(view,P,_), P != root.
:- entity(field,P,_), P != root.
:- entity(mark,P,_), not entity(view,_,P).
:- entity(scale,P,_), not entity(view,_,P).
:- entity(facet,P,_), not entity(view,_,P).
:- entity(encoding,P,_), not entity(mark,_,P).

%% single_value
% A property holds at most one value per entity.
:- attribute(P,E,V), attribute(P,E,W), V < W.

%% known_kinds
% Only the declared entity kinds may appear.
:- entity(K,_,_), not kind(K).
)lp";

inline constexpr const char* hard = R"lp(%% invalid_domain
% Only values from the declared domain are allowed.
violation(invalid_domain) :- attribute(P,_,V), domain(P,_), not domain(P,V).

%% shape_without_point
% The shape channel only works with point marks.
violation(shape_without_point) :- channel(E,shape), enc_mark(E,M), mark_type(M,T), T != point.

%% size_without_point_text
% The size channel only works when using point or text marks.
violation(size_without_point_text) :- channel(E,size), enc_mark(E,M), mark_type(M,T), T != point, T != text.

%% aggregate_mean_non_number
% Mean and sum only make sense for number fields.
violation(aggregate_mean_non_number) :- aggregate(E,mean), enc_type(E,T), T != number.
violation(aggregate_mean_non_number) :- aggregate(E,sum), enc_type(E,T), T != number.

%% aggregate_without_field
% Aggregates other than count need a field to summarize.
violation(aggregate_without_field) :- aggregate(E,A), A != count, not field_of(E,_).

%% count_without_field
% Count summarizes records, so it must come without a field.
violation(count_without_field) :- aggregate(E,count), field_of(E,_).

%% encoding_without_field
% An encoding shows either a field or a count.
violation(encoding_without_field) :- channel(E,_), not field_of(E,_), not aggregate(E,count).

%% encoding_field_exists
% Encoded fields must be declared in the data schema.
violation(encoding_field_exists) :- field_of(E,F), not field_name(F).

%% one_scale_per_view_channel
% Each channel used in a view has exactly one scale, shared by all its encodings.
violation(one_scale_per_view_channel) :- entity(scale,V,S1), entity(scale,V,S2), S1 < S2, attribute((scale,channel),S1,C), attribute((scale,channel),S2,C).
violation(one_scale_per_view_channel) :- view_channel(V,C), not has_scale(V,C).
violation(one_scale_per_view_channel) :- entity(scale,V,S), attribute((scale,channel),S,C), not view_channel(V,C).

%% channel_unique_per_mark
% A mark uses each channel at most once.
violation(channel_unique_per_mark) :- enc_mark(E1,M), enc_mark(E2,M), E1 < E2, channel(E1,C), channel(E2,C).

%% log_requires_number
% Log scales need number fields.
violation(log_requires_number) :- enc_scale(E,log), enc_type(E,T), T != number.

%% text_channel_without_text_mark
% The text channel belongs to text marks.
violation(text_channel_without_text_mark) :- channel(E,text), enc_mark(E,M), mark_type(M,T), T != text.

%% bar_tick_continuous_x_y
% Bars and ticks need a continuous x or y: the bar length, the tick position.
violation(bar_tick_continuous_x_y) :- mark_type(M,bar), not has_continuous_position(M).
violation(bar_tick_continuous_x_y) :- mark_type(M,tick), not has_continuous_position(M).

%% line_area_require_x_y
% Lines and areas connect points, so they need both x and y.
violation(line_area_require_x_y) :- mark_type(M,line), not has_channel(M,x).
violation(line_area_require_x_y) :- mark_type(M,line), not has_channel(M,y).
violation(line_area_require_x_y) :- mark_type(M,area), not has_channel(M,x).
violation(line_area_require_x_y) :- mark_type(M,area), not has_channel(M,y).

%% binning_requires_number_or_datetime
% Only number and datetime fields can be binned.
violation(binning_requires_number_or_datetime) :- binned(E), enc_type(E,T), T != number, T != datetime.
violation(binning_requires_number_or_datetime) :- binned(E), not field_of(E,_).

%% bin_and_aggregate
% An encoding is either binned or aggregated, not both.
violation(bin_and_aggregate) :- binned(E), aggregated(E).

%% mark_without_encoding
% Every mark encodes something.
violation(mark_without_encoding) :- entity(mark,_,M), not has_encoding(M).

%% polar_requires_bar
% Polar coordinates are only supported for bar marks, drawn as arcs.
violation(polar_requires_bar) :- polar(V), mark_view(M,V), mark_type(M,T), T != bar.

%% invalid_stack
% Stacking applies to continuous x or y encodings of bars and areas.
violation(invalid_stack) :- stacked(E,_), channel(E,C), not positional(C).
violation(invalid_stack) :- stacked(E,_), enc_mark(E,M), mark_type(M,T), T != bar, T != area.
violation(invalid_stack) :- stacked(E,_), enc_scale(E,T), discrete_scale(T).

%% continuous_scale_requires_quantity
% Linear and log scales need numbers or dates.
violation(continuous_scale_requires_quantity) :- enc_scale(E,T), continuous_scale(T), enc_type(E,F), F != number, F != datetime.

%% aggregate_requires_continuous_scale
% Aggregated values are quantities and need a linear or log scale.
violation(aggregate_requires_continuous_scale) :- aggregated(E), enc_scale(E,T), discrete_scale(T).

%% shape_requires_discrete_scale
% Shapes cannot show a continuous range.
violation(shape_requires_discrete_scale) :- channel(E,shape), enc_scale(E,T), continuous_scale(T).
)lp";

inline constexpr const char* soft = R"lp(%% encoding_count
% Using fewer encodings is preferred. One violation per encoding.
violation(encoding_count,E) :- entity(encoding,_,E).

%% time_not_x
% Prefer datetime fields on the x axis.
violation(time_not_x,E) :- enc_type(E,datetime), channel(E,C), C != x.

%% aggregate_penalty
% Aggregation hides individual records.
violation(aggregate_penalty,E) :- aggregated(E).

%% binning_penalty
% Binning loses precision.
violation(binning_penalty,E) :- binned(E).

%% facet_penalty
% Small multiples cost screen space.
violation(facet_penalty,F) :- entity(facet,_,F).

%% high_cardinality_color
% Color distinguishes only a handful of categories.
violation(high_cardinality_color,E) :- channel(E,color), field_of(E,F), field_unique(F,U), U > 12, not binned(E).

%% high_cardinality_shape
% Shape distinguishes even fewer categories than color.
violation(high_cardinality_shape,E) :- channel(E,shape), field_of(E,F), field_unique(F,U), U > 6.

%% high_cardinality_axis
% Discrete axes with many values become unreadable.
violation(high_cardinality_axis,E) :- channel(E,C), positional(C), enc_scale(E,T), discrete_scale(T), field_of(E,F), field_unique(F,U), U > 50, not binned(E).

%% log_penalty
% Log scales are harder to read than linear ones.
violation(log_penalty,S) :- attribute((scale,type),S,log).

%% polar_penalty
% Angles and radii are compared less accurately than positions.
violation(polar_penalty,V) :- polar(V).

%% stack_penalty
% Stacked segments are hard to compare.
violation(stack_penalty,E) :- stacked(E,_).

%% normalize_penalty
% Normalized stacks hide absolute values.
violation(normalize_penalty,E) :- stacked(E,normalize).

%% same_field_twice
% Encoding the same field twice in one mark adds little.
violation(same_field_twice,(E1,E2)) :- enc_mark(E1,M), enc_mark(E2,M), E1 < E2, field_of(E1,F), field_of(E2,F).

%% count_twice
% One count per mark is enough.
violation(count_twice,(E1,E2)) :- enc_mark(E1,M), enc_mark(E2,M), E1 < E2, aggregate(E1,count), aggregate(E2,count).

%% point_mark
% Points are a safe default with a small cost.
violation(point_mark,M) :- mark_type(M,point).

%% tick_mark
% Ticks suit one-dimensional distributions only.
violation(tick_mark,M) :- mark_type(M,tick).

%% line_mark
% Lines imply an order along x.
violation(line_mark,M) :- mark_type(M,line).

%% area_mark
% Areas imply order and a zero baseline.
violation(area_mark,M) :- mark_type(M,area).

%% text_mark
% Text marks are hard to scan.
violation(text_mark,M) :- mark_type(M,text).

%% rect_mark
% Rectangles tile the plane and need two discrete axes to read well.
violation(rect_mark,M) :- mark_type(M,rect).

%% bar_unsummarized
% Bars along a continuous raw field overlap one another.
violation(bar_unsummarized,E) :- mark_type(M,bar), enc_mark(E,M), channel(E,C), positional(C), field_of(E,_), enc_scale(E,T), continuous_scale(T), not aggregated(E), not binned(E).

%% line_without_datetime_x
% Lines read best over time on x.
violation(line_without_datetime_x,M) :- mark_type(M,line), enc_mark(E,M), channel(E,x), not enc_type(E,datetime).

%% overplotting
% Many unaggregated records pile up on points, ticks, and text.
violation(overplotting,M) :- attribute(number_rows,root,N), N > 100, mark_type(M,T), T != bar, T != line, T != area, T != rect, has_encoding(M), not mark_aggregated(M).

%% discrete_number
% Unbinned numbers lose their order on ordinal or categorical scales.
violation(discrete_number,E) :- enc_type(E,number), not binned(E), enc_scale(E,T), discrete_scale(T).

%% datetime_categorical
% Dates are ordered; categorical scales drop that order.
violation(datetime_categorical,E) :- enc_type(E,datetime), enc_scale(E,categorical).

%% size_discrete
% Size suggests magnitude and fits continuous scales.
violation(size_discrete,E) :- channel(E,size), enc_scale(E,T), discrete_scale(T).

%% text_mark_without_text_channel
% A text mark without the text channel shows nothing to read.
violation(text_mark_without_text_channel,M) :- mark_type(M,text), not has_channel(M,text).

%% y_without_x
% With a single axis, x is the conventional choice.
violation(y_without_x,M) :- has_channel(M,y), not has_channel(M,x).

%% retinal_without_position
% Color, size, shape, and text read poorly without a positional encoding.
violation(retinal_without_position,E) :- enc_mark(E,M), channel(E,C), not positional(C), not has_positional(M).

%% non_positional_channel
% Position is the most effective channel.
violation(non_positional_channel,E) :- channel(E,C), not positional(C).

%% summary_without_aggregate
% A summary task favors aggregated or binned encodings. The task values are our choice.
violation(summary_without_aggregate,E) :- task(summary), field_of(E,_), not aggregated(E), not binned(E).

%% value_with_aggregate
% A value lookup task favors raw values.
violation(value_with_aggregate,E) :- task(value), aggregated(E).

%% rect_without_binned_color
% Heatmaps usually color by an aggregate. Kept at a low weight on purpose.
violation(rect_without_binned_color,M) :- mark_type(M,rect), not summarized_color(M).
summarized_color(M) :- enc_mark(E,M), channel(E,color), aggregated(E).
summarized_color(M) :- enc_mark(E,M), channel(E,color), binned(E).

%% aggregate_without_group
% A field aggregated with nothing to group by shrinks to one value. Counting records is exempt.
violation(aggregate_without_group,E) :- aggregated(E), not aggregate(E,count), enc_mark(E,M), not grouped(M).
)lp";

inline constexpr const char* weights = R"json({
  "aggregate_penalty": 1,
  "aggregate_without_group": 3,
  "area_mark": 2,
  "bar_unsummarized": 6,
  "binning_penalty": 2,
  "count_twice": 4,
  "datetime_categorical": 2,
  "discrete_number": 2,
  "encoding_count": 2,
  "facet_penalty": 3,
  "high_cardinality_axis": 3,
  "high_cardinality_color": 10,
  "high_cardinality_shape": 10,
  "line_mark": 1,
  "line_without_datetime_x": 3,
  "log_penalty": 2,
  "non_positional_channel": 1,
  "normalize_penalty": 1,
  "overplotting": 5,
  "point_mark": 1,
  "polar_penalty": 4,
  "rect_mark": 2,
  "rect_without_binned_color": 1,
  "retinal_without_position": 5,
  "same_field_twice": 6,
  "size_discrete": 2,
  "stack_penalty": 1,
  "summary_without_aggregate": 4,
  "text_mark": 3,
  "text_mark_without_text_channel": 3,
  "tick_mark": 1,
  "time_not_x": 4,
  "value_with_aggregate": 4,
  "y_without_x": 1
}
)json";

}  // namespace draco::default_kb
