//! Catalog persistence and verification, plus the exact text formats the
//! command-line surface uses: rationals as "p/q" strings (never JSON
//! numbers), matrices as row-major arrays, and semicolon/comma matrix
//! input. Catalog files carry a digest over their payload so corruption
//! and tampering are detected before any record is trusted.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::{rank1, sym_dim, transform, IntVector, QuadForm, UnimodularMap};
use crate::perfection::{
    cone_from_parts_with_facets, invariant_key, is_equivalent, neighbor_across, perfection_rank_of,
    Facet, NeighborLink, PerfectFormRecord,
};
use crate::shortvec::{minimal_vectors, MinVecSet};
use crate::{Error, Rat, Result};

pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// "p" or "p/q": exact and survives every JSON parser.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_from_string(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim())
        .map_err(|e| Error::InvalidArgument(format!("bad rational '{s}': {e}")))
}

/// Parses "2,1;1,2" with entries like "3" or "-5/2".
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<Rat>>> {
    let rows: Vec<&str> = s.split(';').collect();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let entries: Vec<Rat> = row
            .split(',')
            .map(rat_from_string)
            .collect::<Result<_>>()?;
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty matrix row".into()));
        }
        out.push(entries);
    }
    Ok(out)
}

pub fn matrix_to_string(rows: &[Vec<Rat>]) -> String {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(rat_to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn rows_to_doc(rows: &[Vec<Rat>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(rat_to_string).collect())
        .collect()
}

fn doc_to_rows(doc: &[Vec<String>]) -> Result<Vec<Vec<Rat>>> {
    doc.iter()
        .map(|r| r.iter().map(|s| rat_from_string(s)).collect())
        .collect()
}

pub fn quadform_to_doc(q: &QuadForm) -> Vec<Vec<String>> {
    rows_to_doc(&q.rows())
}

pub fn quadform_from_doc(doc: &[Vec<String>]) -> Result<QuadForm> {
    QuadForm::from_rows(&doc_to_rows(doc)?)
}

fn intvec_to_doc(v: &IntVector) -> Vec<String> {
    v.coords().iter().map(|c| c.to_string()).collect()
}

fn intvec_from_doc(doc: &[String]) -> Result<IntVector> {
    let coords = doc
        .iter()
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("bad integer '{s}': {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntVector::new(coords))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetDoc {
    pub normal: Vec<Vec<String>>,
    pub incident: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassDoc {
    pub id: usize,
    pub gram: Vec<Vec<String>>,
    pub minimum: String,
    pub kissing: usize,
    pub determinant: String,
    pub min_vectors: Vec<Vec<String>>,
    pub facets: Vec<FacetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkDoc {
    pub facet: usize,
    pub neighbor: usize,
    pub witness: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub class: usize,
    pub links: Vec<LinkDoc>,
}

/// Digest-covered payload; the file is this plus a "digest" field.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatalogPayload {
    version: u32,
    g: usize,
    classes: Vec<ClassDoc>,
    certificates: Vec<CertificateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogFile {
    pub version: u32,
    pub g: usize,
    pub classes: Vec<ClassDoc>,
    pub certificates: Vec<CertificateDoc>,
    pub digest: String,
}

fn payload_digest(payload: &CatalogPayload) -> Result<String> {
    let canonical = serde_json::to_string(payload)?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

pub fn catalog_to_file(g: usize, records: &[PerfectFormRecord]) -> Result<CatalogFile> {
    let classes: Vec<ClassDoc> = records
        .iter()
        .enumerate()
        .map(|(id, rec)| ClassDoc {
            id,
            gram: quadform_to_doc(&rec.form),
            minimum: rat_to_string(&rec.minvecs.minimum),
            kissing: rec.minvecs.kissing,
            determinant: rat_to_string(&rec.form.det()),
            min_vectors: rec.minvecs.reps.iter().map(intvec_to_doc).collect(),
            facets: rec
                .cone
                .facets()
                .iter()
                .map(|f| FacetDoc {
                    normal: quadform_to_doc(&f.normal),
                    incident: f.incident.clone(),
                })
                .collect(),
            aut_order: rec.aut_order,
        })
        .collect();
    let certificates: Vec<CertificateDoc> = records
        .iter()
        .enumerate()
        .map(|(id, rec)| CertificateDoc {
            class: id,
            links: rec
                .neighbors
                .iter()
                .map(|l| LinkDoc {
                    facet: l.facet,
                    neighbor: l.class,
                    witness: l
                        .witness
                        .rows()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_string()).collect())
                        .collect(),
                })
                .collect(),
        })
        .collect();
    let payload = CatalogPayload {
        version: CATALOG_FORMAT_VERSION,
        g,
        classes,
        certificates,
    };
    let digest = payload_digest(&payload)?;
    Ok(CatalogFile {
        version: payload.version,
        g: payload.g,
        classes: payload.classes,
        certificates: payload.certificates,
        digest,
    })
}

/// Rebuilds typed records from a parsed file. Field-level validation
/// happens in the type constructors; the digest must already have been
/// checked by the caller (load does).
pub fn records_from_file(file: &CatalogFile) -> Result<Vec<PerfectFormRecord>> {
    let mut records = Vec::with_capacity(file.classes.len());
    for class in &file.classes {
        let form = quadform_from_doc(&class.gram)?;
        let minimum = rat_from_string(&class.minimum)?;
        let reps = class
            .min_vectors
            .iter()
            .map(|v| intvec_from_doc(v))
            .collect::<Result<Vec<_>>>()?;
        let minvecs = MinVecSet {
            minimum,
            reps: reps.clone(),
            kissing: class.kissing,
        };
        let generators = reps
            .iter()
            .map(|r| rank1(r))
            .collect::<Result<Vec<_>>>()?;
        let facets = class
            .facets
            .iter()
            .map(|f| {
                Ok(Facet {
                    normal: quadform_from_doc(&f.normal)?,
                    incident: f.incident.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cone = cone_from_parts_with_facets(file.g, reps, generators, facets);
        let cert = file
            .certificates
            .iter()
            .find(|c| c.class == class.id)
            .ok_or_else(|| {
                Error::CatalogInvalid(format!("class {} has no certificate entry", class.id))
            })?;
        let neighbors = cert
            .links
            .iter()
            .map(|l| {
                let rows: Vec<Vec<crate::Int>> = l
                    .witness
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|s| {
                                s.parse().map_err(|e| {
                                    Error::InvalidArgument(format!("bad integer '{s}': {e}"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                let flat: Vec<crate::Int> = rows.iter().flatten().cloned().collect();
                let witness = UnimodularMap::new(file.g, flat)?;
                Ok(NeighborLink {
                    facet: l.facet,
                    class: l.neighbor,
                    witness,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let key = invariant_key(&form, &minvecs);
        records.push(PerfectFormRecord {
            form,
            minvecs,
            cone,
            key,
            neighbors,
            aut_order: class.aut_order,
        });
    }
    Ok(records)
}

pub fn catalog_save(path: &Path, file: &CatalogFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn catalog_load(path: &Path) -> Result<CatalogFile> {
    let text = std::fs::read_to_string(path)?;
    let file: CatalogFile = serde_json::from_str(&text)?;
    if file.version != CATALOG_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: file.version,
            expected: CATALOG_FORMAT_VERSION,
        });
    }
    let payload = CatalogPayload {
        version: file.version,
        g: file.g,
        classes: file.classes.clone(),
        certificates: file.certificates.clone(),
    };
    if payload_digest(&payload)? != file.digest {
        return Err(Error::DigestMismatch);
    }
    Ok(file)
}

/// Independent re-verification of a catalog: recomputes minimal vectors
/// and perfection ranks for every class and re-derives one neighbor per
/// class, comparing against the stored links.
pub fn catalog_verify(file: &CatalogFile) -> Result<()> {
    let records = records_from_file(file)?;
    for (id, rec) in records.iter().enumerate() {
        let mv = minimal_vectors(&rec.form)
            .map_err(|e| Error::CatalogInvalid(format!("class {id}: {e}")))?;
        if mv != rec.minvecs {
            return Err(Error::CatalogInvalid(format!(
                "class {id}: stored minimal vectors disagree with re-enumeration"
            )));
        }
        if perfection_rank_of(&mv) != sym_dim(file.g) {
            return Err(Error::CatalogInvalid(format!(
                "class {id}: form is not perfect"
            )));
        }
        let crossable: Vec<usize> = rec
            .cone
            .facets()
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.incident.is_empty())
            .map(|(i, _)| i)
            .collect();
        let linked: Vec<usize> = rec.neighbors.iter().map(|l| l.facet).collect();
        if crossable != linked {
            return Err(Error::CatalogInvalid(format!(
                "class {id}: neighbor links do not cover the crossable facets"
            )));
        }
        for link in &rec.neighbors {
            if link.class >= records.len() {
                return Err(Error::CatalogInvalid(format!(
                    "class {id}: neighbor id {} out of range",
                    link.class
                )));
            }
        }
        // re-derive one neighbor and check the stored witness against it
        if let Some(link) = rec.neighbors.first() {
            let (_, q_new, _) = neighbor_across(&rec.form, &rec.minvecs, &rec.cone, link.facet)
                .map_err(|e| Error::CatalogInvalid(format!("class {id}: {e}")))?;
            let (prim, _) = q_new.primitive_integer_form();
            let target = transform(&records[link.class].form, &link.witness)
                .map_err(|e| Error::CatalogInvalid(format!("class {id}: {e}")))?;
            if target != prim {
                return Err(Error::CatalogInvalid(format!(
                    "class {id}: stored neighbor witness does not reproduce the contiguous form"
                )));
            }
            if is_equivalent(&records[link.class].form, &prim)
                .map_err(|e| Error::CatalogInvalid(format!("class {id}: {e}")))?
                .is_none()
            {
                return Err(Error::CatalogInvalid(format!(
                    "class {id}: recomputed neighbor is not equivalent to the stored class"
                )));
            }
        }
    }
    Ok(())
}
