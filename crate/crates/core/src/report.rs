//! Centrality reports and their CSV / JSON forms.

use serde::Serialize;

use crate::error::Result;
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportMode {
    Individual,
    Group,
    Shapley,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Estimated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ReportKey {
    Node(NodeId),
    Group(Vec<NodeId>),
}

/// Parameters of an estimated report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateParameters {
    pub epsilon: f64,
    pub ell: f64,
    pub k: usize,
    pub seed: u64,
    pub workers: usize,
    pub rr_sets: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityReport {
    pub mode: ReportMode,
    pub function: String,
    pub method: Method,
    pub keys: Vec<ReportKey>,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<EstimateParameters>,
}

impl CentralityReport {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn key_label(key: &ReportKey, labels: Option<&[String]>) -> String {
        let name = |v: NodeId| labels.map_or_else(|| v.to_string(), |l| l[v].clone());
        match key {
            ReportKey::Node(v) => name(*v),
            ReportKey::Group(s) => s.iter().map(|&v| name(v)).collect::<Vec<_>>().join(","),
        }
    }

    /// `node,value` (or `group,value`) rows. Group members are comma-joined
    /// and quoted.
    pub fn to_csv(&self, labels: Option<&[String]>) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let head = if self.mode == ReportMode::Group { "group" } else { "node" };
        match &self.std_errors {
            Some(_) => w.write_record([head, "value", "std_error"])?,
            None => w.write_record([head, "value"])?,
        }
        for (i, (key, value)) in self.keys.iter().zip(&self.values).enumerate() {
            let label = Self::key_label(key, labels);
            let value = value.to_string();
            match &self.std_errors {
                Some(se) => w.write_record([label, value, se[i].to_string()])?,
                None => w.write_record([label, value])?,
            }
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Pretty JSON with a metadata block and a `values` array.
    pub fn to_json<T: Serialize>(&self, labels: Option<&[String]>, extra: Option<&T>) -> Result<String> {
        #[derive(Serialize)]
        struct Row {
            key: String,
            value: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            std_error: Option<f64>,
        }
        #[derive(Serialize)]
        struct Doc<'a, T: Serialize> {
            metadata: Meta<'a>,
            values: Vec<Row>,
            #[serde(skip_serializing_if = "Option::is_none")]
            trace: Option<&'a T>,
        }
        #[derive(Serialize)]
        struct Meta<'a> {
            mode: ReportMode,
            function: &'a str,
            method: Method,
            #[serde(skip_serializing_if = "Option::is_none")]
            parameters: Option<&'a EstimateParameters>,
        }
        let values = self
            .keys
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(|(i, (k, v))| Row {
                key: Self::key_label(k, labels),
                value: *v,
                std_error: self.std_errors.as_ref().map(|se| se[i]),
            })
            .collect();
        let doc = Doc {
            metadata: Meta {
                mode: self.mode,
                function: &self.function,
                method: self.method,
                parameters: self.parameters.as_ref(),
            },
            values,
            trace: extra,
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}
