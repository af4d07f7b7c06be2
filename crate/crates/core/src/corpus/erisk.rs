//! eRisk subject files: one `<INDIVIDUAL>` per XML file, one `<WRITING>` per post.

use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;

use super::{Corpus, Document, Label};
use crate::error::{Error, Result};

/// Load every `*.xml` subject file in `dir` under one group label.
///
/// Files are read in parallel and concatenated in path order.
pub fn load_erisk_xml(dir: &Path, label: Label) -> Result<Corpus> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_xml = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
        if is_xml && path.is_file() {
            files.push(path);
        }
    }
    files.sort();

    let parts = files
        .par_iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_subject(&text, path, label)
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(parts.into_iter().flatten().collect())
}

fn child_text<'a>(node: roxmltree::Node<'a, 'a>, name: &str) -> Option<String> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name().eq_ignore_ascii_case(name))
        .map(|c| {
            c.descendants()
                .filter(|d| d.is_text())
                .filter_map(|d| d.text())
                .collect::<String>()
                .trim()
                .to_string()
        })
}

fn parse_subject(text: &str, path: &Path, label: Label) -> Result<Vec<Document>> {
    let xml = roxmltree::Document::parse(text).map_err(|e| Error::Xml {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let root = xml.root_element();
    let user_id = child_text(root, "ID")
        .filter(|id| !id.is_empty())
        .ok_or_else(|| Error::Xml {
            path: path.to_path_buf(),
            message: "missing ID element".into(),
        })?;

    let mut docs = Vec::new();
    let writings = root
        .children()
        .filter(|c| c.is_element() && c.tag_name().name().eq_ignore_ascii_case("WRITING"));
    for (i, writing) in writings.enumerate() {
        let Some(body) = child_text(writing, "TEXT") else {
            warn!(
                "{}: WRITING #{} has no TEXT element, skipped",
                path.display(),
                i + 1
            );
            continue;
        };
        docs.push(Document {
            user_id: user_id.clone(),
            label,
            timestamp: child_text(writing, "DATE").filter(|s| !s.is_empty()),
            title: child_text(writing, "TITLE").filter(|s| !s.is_empty()),
            body,
        });
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUBJECT: &str = r#"<INDIVIDUAL>
<ID>subject42</ID>
<WRITING>
  <TITLE> First post </TITLE>
  <DATE> 2014-05-01 10:00:00 </DATE>
  <INFO> reddit post </INFO>
  <TEXT>  I feel tired today.  </TEXT>
</WRITING>
<WRITING>
  <TITLE></TITLE>
  <DATE>2014-05-02 11:00:00</DATE>
  <TEXT></TEXT>
</WRITING>
<WRITING>
  <TITLE>no text here</TITLE>
</WRITING>
</INDIVIDUAL>"#;

    #[test]
    fn one_document_per_writing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("subject42_1.xml"), SUBJECT).unwrap();
        let c = load_erisk_xml(dir.path(), Label::Target).unwrap();
        assert_eq!(c.len(), 2);
        let d = &c.documents()[0];
        assert_eq!(d.user_id, "subject42");
        assert_eq!(d.title.as_deref(), Some("First post"));
        assert_eq!(d.body, "I feel tired today.");
        assert_eq!(d.timestamp.as_deref(), Some("2014-05-01 10:00:00"));
        let empty = &c.documents()[1];
        assert_eq!(empty.text(), "");
        assert_eq!(c.counts().target.users, 1);
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_erisk_xml(dir.path(), Label::Control)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bad_xml_names_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("broken.xml"), "<INDIVIDUAL><ID>x</ID>").unwrap();
        let err = load_erisk_xml(dir.path(), Label::Control).unwrap_err();
        assert!(err.to_string().contains("broken.xml"), "{err}");
    }

    #[test]
    fn files_merge_in_path_order() {
        let dir = tempfile::tempdir().unwrap();
        for (name, id) in [("b.xml", "B"), ("a.xml", "A")] {
            let xml = format!(
                "<INDIVIDUAL><ID>{id}</ID><WRITING><TEXT>hi {id}</TEXT></WRITING></INDIVIDUAL>"
            );
            std::fs::write(dir.path().join(name), xml).unwrap();
        }
        let c = load_erisk_xml(dir.path(), Label::Control).unwrap();
        let users: Vec<&str> = c.documents().iter().map(|d| d.user_id.as_str()).collect();
        assert_eq!(users, ["A", "B"]);
    }
}
