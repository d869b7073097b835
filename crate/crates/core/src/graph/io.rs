//! Edge-list and group-file formats.
//!
//! Edge lists hold one `u v` or `u v w` pair per line; a lone label declares
//! an isolated node. Group files are either
//! JSON Lines (`{"id": ..., "nodes": [...]}`) or TSV (`id<TAB>label label ...`).
//! In every format a line starting with `#` is a comment.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Graph, GraphBuilder, Group};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Every line is one edge; a third column is ignored.
    #[default]
    Unweighted,
    /// The third column must be a non-negative integer multiplicity.
    IntegerWeights,
    /// The third column is rounded half-up; edges rounding to zero are dropped.
    RoundToInteger,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct LoadOptions {
    pub weight_mode: WeightMode,
    pub allow_self_loops: bool,
}

impl LoadOptions {
    pub fn new(weight_mode: WeightMode) -> Self {
        Self {
            weight_mode,
            allow_self_loops: false,
        }
    }
}

fn is_skippable(line: &str) -> bool {
    line.is_empty() || line.starts_with('#')
}

pub fn load_graph<R: BufRead>(reader: R, options: &LoadOptions) -> Result<Graph> {
    let mut builder = GraphBuilder::new().allow_self_loops(options.allow_self_loops);
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if is_skippable(line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() == 1 {
            // isolated node declaration
            builder.intern(fields[0]);
            continue;
        }
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `u v` or `u v w`, found {} fields", fields.len()),
            });
        }
        let multiplicity = match (options.weight_mode, fields.get(2)) {
            (WeightMode::Unweighted, _) | (_, None) => 1,
            (WeightMode::IntegerWeights, Some(raw)) => parse_integer_weight(raw, line_no)?,
            (WeightMode::RoundToInteger, Some(raw)) => parse_rounded_weight(raw, line_no)?,
        };
        if fields[0] == fields[1] && !options.allow_self_loops {
            return Err(Error::SelfLoop {
                line: line_no,
                label: fields[0].to_owned(),
            });
        }
        let u = builder.intern(fields[0]);
        let v = builder.intern(fields[1]);
        builder.add_edge(u, v, multiplicity)?;
    }
    Ok(builder.build())
}

fn parse_integer_weight(raw: &str, line: usize) -> Result<u64> {
    if let Ok(w) = raw.parse::<u64>() {
        return Ok(w);
    }
    match raw.parse::<i64>() {
        Ok(w) if w < 0 => Err(Error::NegativeWeight {
            line,
            weight: w as f64,
        }),
        _ => Err(Error::Parse {
            line,
            message: format!("weight {raw:?} is not a non-negative integer"),
        }),
    }
}

fn parse_rounded_weight(raw: &str, line: usize) -> Result<u64> {
    let w: f64 = raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("weight {raw:?} is not a number"),
    })?;
    if !w.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("weight {raw:?} is not finite"),
        });
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight { line, weight: w });
    }
    Ok((w + 0.5).floor() as u64)
}

pub fn load_graph_file(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Graph> {
    load_graph(open(path.as_ref())?, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupFormat {
    JsonLines,
    Tsv,
}

#[derive(Deserialize)]
struct GroupRecord {
    id: Value,
    nodes: Vec<Value>,
}

#[derive(Serialize)]
struct GroupRecordOut<'a> {
    id: &'a str,
    nodes: Vec<&'a str>,
}

fn value_to_label(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn resolve(graph: &Graph, label: &str) -> Result<usize> {
    graph
        .node_id(label)
        .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
}

/// Reads groups whose node labels refer to `graph`.
///
/// With `format == None` the format is sniffed from the first data line.
pub fn read_groups<R: BufRead>(
    reader: R,
    graph: &Graph,
    format: Option<GroupFormat>,
) -> Result<Vec<Group>> {
    parse_groups(reader, format, |label| resolve(graph, label))
}

/// Reads groups without a graph, interning unseen labels into `builder`.
pub fn read_groups_interning<R: BufRead>(
    reader: R,
    builder: &mut GraphBuilder,
    format: Option<GroupFormat>,
) -> Result<Vec<Group>> {
    parse_groups(reader, format, |label| Ok(builder.intern(label)))
}

fn parse_groups<R: BufRead>(
    reader: R,
    format: Option<GroupFormat>,
    mut node: impl FnMut(&str) -> Result<usize>,
) -> Result<Vec<Group>> {
    let mut format = format;
    let mut groups = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if is_skippable(trimmed) {
            continue;
        }
        let fmt = *format.get_or_insert(if trimmed.starts_with('{') {
            GroupFormat::JsonLines
        } else {
            GroupFormat::Tsv
        });
        let (id, labels) = match fmt {
            GroupFormat::JsonLines => {
                let record: GroupRecord =
                    serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                let id = value_to_label(&record.id).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "group id must be a string or number".into(),
                })?;
                let labels = record
                    .nodes
                    .iter()
                    .map(|v| {
                        value_to_label(v).ok_or_else(|| Error::Parse {
                            line: line_no,
                            message: format!("node label {v} must be a string or number"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                (id, labels)
            }
            GroupFormat::Tsv => {
                let (id, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "expected `id<TAB>labels`".into(),
                })?;
                let labels = rest.split_whitespace().map(str::to_owned).collect();
                (id.trim().to_owned(), labels)
            }
        };
        let members = labels
            .iter()
            .map(|l| node(l))
            .collect::<Result<Vec<_>>>()?;
        groups.push(Group::new(id, members)?);
    }
    Ok(groups)
}

fn format_for(path: &Path) -> Option<GroupFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => Some(GroupFormat::Tsv),
        Some("jsonl") | Some("json") => Some(GroupFormat::JsonLines),
        _ => None,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_groups_file_interning(path: impl AsRef<Path>, builder: &mut GraphBuilder) -> Result<Vec<Group>> {
    let path = path.as_ref();
    read_groups_interning(open(path)?, builder, format_for(path))
}

pub fn read_groups_file(path: impl AsRef<Path>, graph: &Graph) -> Result<Vec<Group>> {
    let path = path.as_ref();
    read_groups(open(path)?, graph, format_for(path))
}

fn write_header<W: Write>(out: &mut W, header: &[String]) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

/// Writes groups as JSON Lines using node labels, preceded by `#` comment lines.
pub fn write_groups_jsonl<W: Write>(
    mut out: W,
    graph: &Graph,
    groups: &[Group],
    header: &[String],
) -> Result<()> {
    write_header(&mut out, header)?;
    for group in groups {
        let record = GroupRecordOut {
            id: group.id(),
            nodes: group.members().iter().map(|&v| graph.label(v)).collect(),
        };
        serde_json::to_writer(&mut out, &record)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Writes `u v` lines, adding a weight column only for multiplicities above
/// one. Isolated nodes follow as single-label lines.
pub fn write_edge_list<W: Write>(mut out: W, graph: &Graph, header: &[String]) -> Result<()> {
    write_header(&mut out, header)?;
    for (u, v, w) in graph.edges() {
        if w == 1 {
            writeln!(out, "{} {}", graph.label(u), graph.label(v))?;
        } else {
            writeln!(out, "{} {} {}", graph.label(u), graph.label(v), w)?;
        }
    }
    for v in (0..graph.node_count()).filter(|&v| graph.degree(v) == 0) {
        writeln!(out, "{}", graph.label(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, mode: WeightMode) -> Result<Graph> {
        load_graph(text.as_bytes(), &LoadOptions::new(mode))
    }

    #[test]
    fn triangle() {
        let g = load("0 1\n1 2\n2 0\n", WeightMode::Unweighted).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
    }

    #[test]
    fn duplicate_lines_accumulate() {
        let g = load("0 1\n0 1\n", WeightMode::Unweighted).unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn half_up_rounding() {
        let g = load("0 1 2.6\n", WeightMode::RoundToInteger).unwrap();
        assert_eq!(g.multiplicity(0, 1), 3);
        assert_eq!(g.edge_count(), 3);
        let g = load("a b 2.5\nb c 0.4\n", WeightMode::RoundToInteger).unwrap();
        assert_eq!(g.multiplicity(0, 1), 3);
        assert_eq!(g.multiplicity(1, 2), 0);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn labels_and_comments() {
        let g = load("# header\nalice bob\n\nbob carol 7\n", WeightMode::Unweighted).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.node_id("carol"), Some(2));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn integer_weights() {
        let g = load("0 1 4\n", WeightMode::IntegerWeights).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!(matches!(
            load("0 1 1.5\n", WeightMode::IntegerWeights),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            load("0 1\n2 3 4 5\n", WeightMode::Unweighted),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load("0 1\n3 3\n", WeightMode::Unweighted),
            Err(Error::SelfLoop { line: 2, .. })
        ));
        assert!(matches!(
            load("0 1 -2\n", WeightMode::RoundToInteger),
            Err(Error::NegativeWeight { line: 1, .. })
        ));
        assert!(matches!(
            load("0 1 -2\n", WeightMode::IntegerWeights),
            Err(Error::NegativeWeight { line: 1, .. })
        ));
    }

    #[test]
    fn self_loops_when_enabled() {
        let opts = LoadOptions {
            weight_mode: WeightMode::Unweighted,
            allow_self_loops: true,
        };
        let g = load_graph("0 0\n0 1\n".as_bytes(), &opts).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn group_formats() {
        let g = load("a b\nb c\nc d\n", WeightMode::Unweighted).unwrap();
        let jsonl = "# comment\n{\"id\": \"x\", \"nodes\": [\"a\", \"b\"]}\n{\"id\": 7, \"nodes\": [\"c\"]}\n";
        let groups = read_groups(jsonl.as_bytes(), &g, None).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members(), &[0, 1]);
        assert_eq!(groups[1].id(), "7");

        let tsv = "x\ta b\ny\tc d\n";
        let groups = read_groups(tsv.as_bytes(), &g, None).unwrap();
        assert_eq!(groups[1].members(), &[2, 3]);

        let bad = "x\ta zz\n";
        assert!(matches!(
            read_groups(bad.as_bytes(), &g, None),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn numeric_labels_in_json() {
        let g = load("0 1\n1 2\n", WeightMode::Unweighted).unwrap();
        let groups = read_groups("{\"id\":\"g\",\"nodes\":[0,2]}".as_bytes(), &g, None).unwrap();
        assert_eq!(groups[0].members(), &[0, 2]);
    }

    #[test]
    fn writers_reload() {
        let g = load("a b 3\nb c\n", WeightMode::IntegerWeights).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g, &["test".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# test\n"));
        let again = load_graph(text.as_bytes(), &LoadOptions::new(WeightMode::IntegerWeights)).unwrap();
        assert_eq!(again.edge_count(), 4);

        let sparse = load("x y\nlonely\n", WeightMode::Unweighted).unwrap();
        assert_eq!(sparse.node_count(), 3);
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &sparse, &[]).unwrap();
        let back = load_graph(buf.as_slice(), &LoadOptions::default()).unwrap();
        assert_eq!(back.node_count(), 3);
        assert_eq!(back.degree(back.node_id("lonely").unwrap()), 0);

        let groups = vec![Group::new("g", [0, 2]).unwrap()];
        let mut buf = Vec::new();
        write_groups_jsonl(&mut buf, &g, &groups, &[]).unwrap();
        let back = read_groups(buf.as_slice(), &g, None).unwrap();
        assert_eq!(back, groups);

        let mut b = GraphBuilder::new();
        let free = read_groups_interning("x\tp q\ny\tq r s\n".as_bytes(), &mut b, None).unwrap();
        assert_eq!(b.node_count(), 4);
        assert_eq!(free[1].members(), &[1, 2, 3]);
    }
}
