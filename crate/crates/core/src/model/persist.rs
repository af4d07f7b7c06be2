//! Plain-text forest files: a header block followed by one record per node.
//!
//! ```text
//! poslens-forest v1
//! n_trees 50
//! ...
//! feature ADJ 0.0412
//! node 0 0 split 3 0.0185 1 8 412.0
//! node 0 1 leaf 0.25 0.75 3.0
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a save/load
//! cycle reproduces the forest bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::forest::{Forest, ForestParams};
use super::tree::{Node, Tree};
use crate::error::{Error, Result};

const MAGIC: &str = "poslens-forest v1";

impl Forest {
    pub fn to_text(&self) -> String {
        let p = self.params();
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("n_trees {}\n", p.n_trees));
        out.push_str(&format!("max_depth {}\n", p.max_depth));
        out.push_str(&format!("class_weighting {}\n", p.class_weighting));
        out.push_str(&format!("features_per_split {}\n", p.features_per_split));
        out.push_str(&format!("min_samples_leaf {}\n", p.min_samples_leaf));
        out.push_str(&format!("missing {}\n", p.missing));
        out.push_str(&format!("seed {}\n", p.seed));
        for (name, m) in self.feature_names().iter().zip(self.medians()) {
            out.push_str(&format!("feature {name} {m:?}\n"));
        }
        for (t, tree) in self.trees().iter().enumerate() {
            for (i, node) in tree.nodes().iter().enumerate() {
                match *node {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        cover,
                    } => out.push_str(&format!(
                        "node {t} {i} split {feature} {threshold:?} {left} {right} {cover:?}\n"
                    )),
                    Node::Leaf { value, cover } => out.push_str(&format!(
                        "node {t} {i} leaf {:?} {value:?} {cover:?}\n",
                        1.0 - value
                    )),
                }
            }
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.to_text().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), path)
    }

    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<Self> {
        let mut params = ForestParams::default();
        let mut names = Vec::new();
        let mut medians = Vec::new();
        let mut trees: Vec<Vec<Node>> = Vec::new();

        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(l))) if l == MAGIC => {}
            Some((_, Err(e))) => return Err(Error::io(path, e)),
            _ => {
                return Err(Error::ModelFormat(format!(
                    "{}: missing '{MAGIC}' header",
                    path.display()
                )))
            }
        }
        for (n, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = n + 1;
            let bad = |what: &str| Error::parse(path, lineno, format!("{what}: {line:?}"));
            let f: Vec<&str> = line.split(' ').collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
            match (f[0], f.len()) {
                ("n_trees", 2) => params.n_trees = idx(f[1])?,
                ("max_depth", 2) => params.max_depth = idx(f[1])?,
                ("class_weighting", 2) => params.class_weighting = f[1].parse()?,
                ("features_per_split", 2) => params.features_per_split = f[1].parse()?,
                ("min_samples_leaf", 2) => params.min_samples_leaf = idx(f[1])?,
                ("missing", 2) => params.missing = f[1].parse()?,
                ("seed", 2) => params.seed = f[1].parse().map_err(|_| bad("bad seed"))?,
                ("feature", 3) => {
                    names.push(f[1].to_string());
                    medians.push(num(f[2])?);
                }
                ("node", 7 | 9) => {
                    let (t, i) = (idx(f[1])?, idx(f[2])?);
                    if t > trees.len() || (t == trees.len()) != (i == 0) {
                        return Err(bad("node records out of order"));
                    }
                    if t == trees.len() {
                        trees.push(Vec::new());
                    }
                    if trees[t].len() != i {
                        return Err(bad("node records out of order"));
                    }
                    let node = match (f[3], f.len()) {
                        ("split", 9) => Node::Split {
                            feature: idx(f[4])?,
                            threshold: num(f[5])?,
                            left: idx(f[6])?,
                            right: idx(f[7])?,
                            cover: num(f[8])?,
                        },
                        ("leaf", 7) => Node::Leaf {
                            value: num(f[5])?,
                            cover: num(f[6])?,
                        },
                        _ => return Err(bad("malformed node record")),
                    };
                    trees[t].push(node);
                }
                ("", 1) => {}
                _ => return Err(bad("unrecognised record")),
            }
        }
        let trees = trees
            .into_iter()
            .map(Tree::from_nodes)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))?;
        if trees.len() != params.n_trees {
            return Err(Error::ModelFormat(format!(
                "{}: header says {} trees, file has {}",
                path.display(),
                params.n_trees,
                trees.len()
            )));
        }
        Forest::from_parts(trees, params, names, medians)
            .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::model::train_forest;

    #[test]
    fn round_trip() {
        let x: Vec<Vec<Option<f64>>> = (0..30)
            .map(|i| {
                vec![
                    Some(i as f64 * 0.1),
                    if i % 4 == 0 {
                        None
                    } else {
                        Some((i % 3) as f64)
                    },
                ]
            })
            .collect();
        let y: Vec<Label> = (0..30)
            .map(|i| {
                if i % 3 == 0 || i > 20 {
                    Label::Target
                } else {
                    Label::Control
                }
            })
            .collect();
        let params = ForestParams {
            n_trees: 4,
            seed: 9,
            ..Default::default()
        };
        let forest = train_forest(&x, &y, &params)
            .unwrap()
            .with_feature_names(vec!["a".into(), "b".into()])
            .unwrap();
        let text = forest.to_text();
        let back = Forest::read(text.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(back, forest);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_garbage() {
        let p = Path::new("mem");
        assert!(matches!(
            Forest::read("nope\n".as_bytes(), p),
            Err(Error::ModelFormat(_))
        ));
        let truncated = format!("{MAGIC}\nn_trees 2\nfeature a 0.0\nnode 0 0 leaf 0.5 0.5 1.0\n");
        assert!(matches!(
            Forest::read(truncated.as_bytes(), p),
            Err(Error::ModelFormat(_))
        ));
        let junk = format!("{MAGIC}\nwhat 1\n");
        assert!(matches!(
            Forest::read(junk.as_bytes(), p),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
