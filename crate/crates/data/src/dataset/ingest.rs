use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use polymm_core::canon::canonicalize;
use serde::{Deserialize, Serialize};

use super::{DatasetError, PolymerRecord, Source};
use crate::property::Property;

/// Column mapping for one input CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub smiles_column: String,
    /// CSV column name to property.
    pub columns: BTreeMap<String, Property>,
    pub source: Source,
}

impl CsvSchema {
    /// `SMILES` plus one column per property named after it.
    pub fn all_properties(source: Source) -> Self {
        CsvSchema {
            smiles_column: "SMILES".into(),
            columns: Property::ALL.into_iter().map(|p| (p.name().to_string(), p)).collect(),
            source,
        }
    }

    pub fn single(source: Source, column: &str, property: Property) -> Self {
        CsvSchema { smiles_column: "SMILES".into(), columns: [(column.to_string(), property)].into(), source }
    }
}

/// A rejected input row; `row` is the 1-based line number in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub row: u64,
    pub smiles: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub records: Vec<PolymerRecord>,
    pub rejects: Vec<RowError>,
}

pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<Ingested, DatasetError> {
    let file =
        File::open(path).map_err(|e| DatasetError::Csv { path: path.display().to_string(), message: e.to_string() })?;
    ingest_reader(file, schema, &path.display().to_string())
}

fn parse_cell(cell: &str) -> Result<Option<f64>, ()> {
    let t = cell.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("nan") || t.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(()),
    }
}

/// Parse rows; `label` names the input in errors.
pub fn ingest_reader<R: Read>(reader: R, schema: &CsvSchema, label: &str) -> Result<Ingested, DatasetError> {
    let csv_err = |e: csv::Error| DatasetError::Csv { path: label.to_string(), message: e.to_string() };
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let find = |name: &str| header.iter().position(|h| h.trim() == name);

    let mut missing = Vec::new();
    let smiles_at = find(&schema.smiles_column);
    if smiles_at.is_none() {
        missing.push(schema.smiles_column.clone());
    }
    let mut columns = Vec::new();
    for (name, &p) in &schema.columns {
        match find(name) {
            Some(i) => columns.push((name.as_str(), i, p)),
            None => missing.push(name.clone()),
        }
    }
    let Some(smiles_at) = smiles_at.filter(|_| missing.is_empty()) else {
        return Err(DatasetError::SchemaMismatch { path: label.to_string(), missing });
    };

    let mut out = Ingested::default();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        let smiles = row.get(smiles_at).unwrap_or("").trim().to_string();
        let reject = |reason: String| RowError { row: line, smiles: smiles.clone(), reason };
        if smiles.is_empty() {
            out.rejects.push(reject("empty SMILES".into()));
            continue;
        }
        let canonical = match canonicalize(&smiles) {
            Ok(c) => c,
            Err(e) => {
                out.rejects.push(reject(e.to_string()));
                continue;
            }
        };
        let mut record = PolymerRecord::new(canonical, schema.source);
        let mut bad = None;
        for &(name, i, p) in &columns {
            match parse_cell(row.get(i).unwrap_or("")) {
                Ok(Some(v)) => {
                    record.properties.insert(p, v);
                }
                Ok(None) => {}
                Err(()) => {
                    bad = Some(format!("column {name}: not a number"));
                    break;
                }
            }
        }
        match bad {
            Some(reason) => out.rejects.push(reject(reason)),
            None if record.properties.is_empty() => out.rejects.push(reject("no property values".into())),
            None => out.records.push(record),
        }
    }
    Ok(out)
}

/// Error sidecar: `row,smiles,reason`.
pub fn write_rejects<W: Write>(writer: W, rejects: &[RowError]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rejects {
        w.serialize(r)?;
    }
    if rejects.is_empty() {
        w.write_record(["row", "smiles", "reason"])?;
    }
    w.flush()?;
    Ok(())
}

const TABLE_KEY: &str = "psmiles";
const TABLE_SOURCE: &str = "source";

/// Table CSV: key, one column per property (empty when missing), source tag.
pub fn write_table<W: Write>(writer: W, table: &[PolymerRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![TABLE_KEY.to_string()];
    header.extend(Property::ALL.iter().map(|p| p.name().to_string()));
    header.push(TABLE_SOURCE.into());
    w.write_record(&header)?;
    for r in table {
        let mut row = vec![r.canonical_psmiles.clone()];
        row.extend(Property::ALL.iter().map(|&p| r.get(p).map(|v| v.to_string()).unwrap_or_default()));
        row.push(r.source.name().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_table`]. Keys are taken as already canonical.
pub fn read_table<R: Read>(reader: R, label: &str) -> Result<Vec<PolymerRecord>, DatasetError> {
    let err = |message: String| DatasetError::Csv { path: label.to_string(), message };
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
    let expected: Vec<&str> = std::iter::once(TABLE_KEY)
        .chain(Property::ALL.iter().map(|p| p.name()))
        .chain(std::iter::once(TABLE_SOURCE))
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        let missing = expected.iter().filter(|e| !header.iter().any(|h| h == **e)).map(|s| s.to_string()).collect();
        return Err(DatasetError::SchemaMismatch { path: label.to_string(), missing });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let source = row[6].parse::<Source>().map_err(err)?;
        let mut r = PolymerRecord::new(&row[0], source);
        for (i, p) in Property::ALL.into_iter().enumerate() {
            if let Some(v) = parse_cell(&row[i + 1]).map_err(|_| err(format!("bad {p} value {:?}", &row[i + 1])))? {
                r.properties.insert(p, v);
            }
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_rows_go_to_sidecar() {
        let csv = "id,SMILES,Tg\n1,*CC*,100\n2,*C1CC*,50\n3,*CC(*)C,\"-10.5\"\n";
        let got = ingest_reader(csv.as_bytes(), &CsvSchema::single(Source::Supp3, "Tg", Property::Tg), "t").unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.rejects.len(), 1);
        assert_eq!(got.rejects[0].row, 3);
        assert_eq!(got.rejects[0].smiles, "*C1CC*");
        assert_eq!(got.records[1].get(Property::Tg), Some(-10.5));
    }

    #[test]
    fn empty_cells_are_missing() {
        let csv = "SMILES,Tg,FFV,Tc,Density,Rg\n*CC*,,0.37,,,\n*CC(*)C,,,,,\n";
        let got = ingest_reader(csv.as_bytes(), &CsvSchema::all_properties(Source::Main), "t").unwrap();
        assert_eq!(got.records.len(), 1);
        assert_eq!(got.records[0].properties.len(), 1);
        assert_eq!(got.rejects[0].reason, "no property values");
    }

    #[test]
    fn missing_column_is_schema_mismatch() {
        let csv = "SMILES,TC_mean\n*CC*,0.2\n";
        let e = ingest_reader(csv.as_bytes(), &CsvSchema::single(Source::Supp1, "Tc", Property::Tc), "t").unwrap_err();
        assert!(matches!(e, DatasetError::SchemaMismatch { missing, .. } if missing == ["Tc"]));
    }

    #[test]
    fn non_numeric_cell_is_rejected() {
        let csv = "SMILES,Tg\n*CC*,warm\n";
        let got = ingest_reader(csv.as_bytes(), &CsvSchema::single(Source::Supp3, "Tg", Property::Tg), "t").unwrap();
        assert!(got.records.is_empty());
        assert_eq!(got.rejects[0].reason, "column Tg: not a number");
    }

    #[test]
    fn smiles_are_canonicalized() {
        let csv = "SMILES,Tg\nC(*)C*,1\n";
        let got = ingest_reader(csv.as_bytes(), &CsvSchema::single(Source::Supp3, "Tg", Property::Tg), "t").unwrap();
        assert_eq!(got.records[0].canonical_psmiles, canonicalize("*CC*").unwrap());
    }

    #[test]
    fn table_round_trip() {
        let table = vec![
            PolymerRecord::new("*CC*", Source::Main).with(Property::Tg, -12.25).with(Property::Rg, 1e-3),
            PolymerRecord::new("*CC(*)C", Source::Supp4).with(Property::Ffv, 0.1 + 0.2),
        ];
        let mut buf = Vec::new();
        write_table(&mut buf, &table).unwrap();
        assert_eq!(read_table(buf.as_slice(), "t").unwrap(), table);
    }
}
