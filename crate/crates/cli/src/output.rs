use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Json,
}

/// Rows of string cells plus provenance fields echoed in JSON output.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub meta: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Table { headers, rows: Vec::new(), meta: Vec::new() }
    }

    pub fn meta(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.meta.push((key, v.into()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.human(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn human(&self) -> String {
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &mut dyn Iterator<Item = &str>| {
            let padded: Vec<String> = cells.zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&mut self.headers.iter().copied());
        for row in &self.rows {
            out += &line(&mut row.iter().map(String::as_str));
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }

    fn json(&self) -> String {
        let mut obj = Map::new();
        for (k, v) in &self.meta {
            obj.insert(k.to_string(), v.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> =
                    self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), cell_value(h, c))).collect();
                Value::Object(m)
            })
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize") + "\n"
    }
}

const TEXT_COLUMNS: [&str; 5] = ["composition", "partition", "code", "ranks", "arrangement"];

/// Integers and decimals become JSON numbers; fractions and shapes stay strings.
fn cell_value(header: &str, c: &str) -> Value {
    if TEXT_COLUMNS.contains(&header) {
        return Value::String(c.to_string());
    }
    if let Ok(i) = c.parse::<i64>() {
        return Value::Number(i.into());
    }
    if c.contains(['.', 'e']) && !c.contains(',') {
        if let Some(n) = c.parse::<f64>().ok().and_then(Number::from_f64) {
            return Value::Number(n);
        }
    }
    if c.is_empty() {
        return Value::Null;
    }
    Value::String(c.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_three_ways() {
        let mut t = Table::new(vec!["composition", "p"]).meta("family", "ewens:theta=1");
        t.push(vec!["2,1".into(), "1/3".into()]);
        t.push(vec!["3".into(), "0.25".into()]);
        assert_eq!(t.render(Format::Csv), "composition,p\n\"2,1\",1/3\n3,0.25\n");
        assert_eq!(t.render(Format::Human), "composition  p\n2,1          1/3\n3            0.25\n");
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v["family"], "ewens:theta=1");
        assert_eq!(v["rows"][0]["p"], "1/3");
        assert_eq!(v["rows"][1]["composition"], "3");
        assert_eq!(v["rows"][1]["p"], 0.25);
    }
}
