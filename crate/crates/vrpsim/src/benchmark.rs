//! Parsers for standard OR benchmark instance files.
//!
//! Three text grammars are supported, all keeping native units (no
//! normalization; the gap metric is scale-free):
//!
//! * `solomon` (CVRPTW): an instance-name line, a `VEHICLE` section with a
//!   `NUMBER`/`CAPACITY` header and one line of two integers, then a
//!   `CUSTOMER` section with a column-header line and rows of seven
//!   numbers (id, x, y, demand, ready time, due date, service time).
//!   Row id 0 is the depot.
//! * `li_lim` (PDPTW): the same sections with two extra row fields, the
//!   pickup index and the delivery index. A pickup row names its delivery
//!   in field 9; a delivery row names its pickup in field 8 and may carry
//!   the negated demand.
//! * `cordeau` (MDVRPTW): a first line of `type m n t` counts (m vehicles
//!   per depot, n customers, t depots), t lines of `D Q` per-depot limits
//!   (the route-duration field D is not modeled and must be 0), n
//!   customer rows of `id x y service demand f a <a combinations> open
//!   close`, and t depot rows closing the file. Depots are reordered to
//!   the front of the node list.
//!
//! Malformed input fails with a 1-based line number; negative demands or
//! inverted windows are validation errors.

use crate::error::ParseError;
use crate::instance::{InstanceData, InstanceParts, Problem, SquareMatrix};

/// Supported benchmark grammars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkFormat {
    Solomon,
    LiLim,
    Cordeau,
}

impl std::str::FromStr for BenchmarkFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "solomon" => Ok(BenchmarkFormat::Solomon),
            "li_lim" | "lilim" => Ok(BenchmarkFormat::LiLim),
            "cordeau" => Ok(BenchmarkFormat::Cordeau),
            other => Err(format!("unknown benchmark format `{other}`")),
        }
    }
}

/// Parses a complete benchmark file into instance data.
pub fn parse_benchmark(format: BenchmarkFormat, bytes: &[u8]) -> Result<InstanceData, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Syntax {
        line: 0,
        message: format!("input is not valid UTF-8: {e}"),
    })?;
    match format {
        BenchmarkFormat::Solomon => parse_solomon_like(text, false),
        BenchmarkFormat::LiLim => parse_solomon_like(text, true),
        BenchmarkFormat::Cordeau => parse_cordeau(text),
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn invalid(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Validation {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with their 1-based numbers.
struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    /// Line number just past the last line seen; for EOF reports.
    end: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
            end: 1,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.iter.by_ref() {
            self.end = idx + 2;
            if !raw.trim().is_empty() {
                return Some((idx + 1, raw));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next()
            .ok_or_else(|| syntax(self.end, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_number(token: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    let value = token
        .parse::<f64>()
        .map_err(|_| syntax(line, format!("{what}: `{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(invalid(line, format!("{what}: `{token}` is not finite")));
    }
    Ok(value)
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    token.parse::<usize>().map_err(|_| {
        syntax(
            line,
            format!("{what}: `{token}` is not a non-negative integer"),
        )
    })
}

fn parse_solomon_like(text: &str, with_pairing: bool) -> Result<InstanceData, ParseError> {
    let mut lines = Lines::new(text);

    let (line_no, name_line) = lines.expect("the instance name")?;
    let mut name_tokens = name_line.split_whitespace();
    let name = name_tokens
        .next()
        .ok_or_else(|| syntax(line_no, "missing instance name"))?
        .to_string();
    if name_tokens.next().is_some() {
        return Err(syntax(line_no, "instance name must be a single token"));
    }

    let (line_no, vehicle) = lines.expect("the VEHICLE section")?;
    if vehicle.trim() != "VEHICLE" {
        return Err(syntax(line_no, "expected the VEHICLE section header"));
    }
    let (line_no, header) = lines.expect("the NUMBER/CAPACITY header")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens != ["NUMBER", "CAPACITY"] {
        return Err(syntax(line_no, "expected the NUMBER CAPACITY header"));
    }
    let (line_no, fleet) = lines.expect("the fleet line")?;
    let tokens: Vec<&str> = fleet.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(syntax(line_no, "fleet line must carry two integers"));
    }
    let num_vehicles = parse_count(tokens[0], line_no, "vehicle count")?;
    let capacity = parse_number(tokens[1], line_no, "capacity")?;
    if num_vehicles == 0 {
        return Err(invalid(line_no, "vehicle count must be positive"));
    }
    if capacity <= 0.0 {
        return Err(invalid(line_no, "capacity must be positive"));
    }

    let (line_no, customer) = lines.expect("the CUSTOMER section")?;
    if customer.trim() != "CUSTOMER" {
        return Err(syntax(line_no, "expected the CUSTOMER section header"));
    }
    let (line_no, header) = lines.expect("the customer column header")?;
    if header.split_whitespace().next() != Some("CUST") {
        return Err(syntax(line_no, "expected the customer column header"));
    }

    let width = if with_pairing { 9 } else { 7 };
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    while let Some((line_no, row)) = lines.next() {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != width {
            return Err(syntax(
                line_no,
                format!("customer row has {} fields, expected {width}", tokens.len()),
            ));
        }
        let id = parse_count(tokens[0], line_no, "customer id")?;
        if id != rows.len() {
            return Err(syntax(
                line_no,
                format!("customer id {id} out of order, expected {}", rows.len()),
            ));
        }
        let values = tokens[1..]
            .iter()
            .enumerate()
            .map(|(i, t)| parse_number(t, line_no, &format!("field {}", i + 2)))
            .collect::<Result<Vec<f64>, ParseError>>()?;
        rows.push((line_no, values));
    }
    if rows.is_empty() {
        return Err(syntax(lines.end, "no customer rows"));
    }

    let n = rows.len();
    let mut coords = Vec::with_capacity(n);
    let mut demand = vec![0.0; n];
    let mut service_time = vec![0.0; n];
    let mut tw_open = vec![0.0; n];
    let mut tw_close = vec![0.0; n];
    let mut pickup_of: Vec<Option<usize>> = vec![None; n];
    let mut delivery_claim: Vec<Option<usize>> = vec![None; n];

    for (i, (line_no, v)) in rows.iter().enumerate() {
        let line_no = *line_no;
        coords.push([v[0], v[1]]);
        let d = v[2];
        let (ready, due, service) = (v[3], v[4], v[5]);
        if ready < 0.0 || due < 0.0 {
            return Err(invalid(line_no, "negative time window"));
        }
        if ready > due {
            return Err(invalid(
                line_no,
                format!("inverted window [{ready}, {due}]"),
            ));
        }
        if service < 0.0 {
            return Err(invalid(line_no, "negative service time"));
        }
        tw_open[i] = ready;
        tw_close[i] = due;
        service_time[i] = if i == 0 { 0.0 } else { service };

        if with_pairing {
            let pickup_idx = v[6];
            let delivery_idx = v[7];
            if pickup_idx < 0.0 || delivery_idx < 0.0 {
                return Err(invalid(line_no, "negative pairing index"));
            }
            let pickup_idx = pickup_idx as usize;
            let delivery_idx = delivery_idx as usize;
            if i == 0 {
                if pickup_idx != 0 || delivery_idx != 0 {
                    return Err(invalid(line_no, "depot row cannot be paired"));
                }
                demand[i] = 0.0;
                continue;
            }
            match (pickup_idx, delivery_idx) {
                (0, del) if del > 0 => {
                    // Pickup row naming its delivery.
                    if del >= n {
                        return Err(invalid(
                            line_no,
                            format!("delivery index {del} out of range"),
                        ));
                    }
                    if d < 0.0 {
                        return Err(invalid(line_no, "pickup row with negative demand"));
                    }
                    demand[i] = d;
                    delivery_claim[i] = Some(del);
                }
                (p, 0) if p > 0 => {
                    // Delivery row naming its pickup; demand is recorded
                    // negated in the wild.
                    if p >= n {
                        return Err(invalid(line_no, format!("pickup index {p} out of range")));
                    }
                    demand[i] = d.abs();
                    pickup_of[i] = Some(p);
                }
                _ => {
                    return Err(invalid(
                        line_no,
                        "row must name exactly one of pickup or delivery",
                    ))
                }
            }
        } else {
            if d < 0.0 {
                return Err(invalid(line_no, format!("negative demand {d}")));
            }
            if i == 0 && d != 0.0 {
                return Err(invalid(line_no, "depot demand must be zero"));
            }
            demand[i] = d;
        }
    }

    if with_pairing {
        // Cross-check the two directions of the pairing.
        for i in 1..n {
            if let Some(del) = delivery_claim[i] {
                if pickup_of[del] != Some(i) {
                    return Err(invalid(
                        rows[i].0,
                        format!("pickup {i} names delivery {del}, which does not point back"),
                    ));
                }
            }
        }
        for i in 1..n {
            if let Some(p) = pickup_of[i] {
                if delivery_claim[p] != Some(i) {
                    return Err(invalid(
                        rows[i].0,
                        format!("delivery {i} names pickup {p}, which does not point back"),
                    ));
                }
            }
        }
    }

    let problem = if with_pairing {
        Problem::Pdptw
    } else {
        Problem::Cvrptw
    };
    let mut is_depot = vec![false; n];
    is_depot[0] = true;

    InstanceData::new(InstanceParts {
        name,
        problem,
        seed: 0,
        coords,
        is_depot,
        demand,
        profit: vec![0.0; n],
        service_time,
        tw_open,
        tw_close,
        capacity,
        agent_home_depot: vec![0; num_vehicles],
        pickup_of,
        soft: None,
        explicit_travel: None,
    })
    .map_err(|e| invalid(0, e.to_string()))
}

fn parse_cordeau(text: &str) -> Result<InstanceData, ParseError> {
    let mut lines = Lines::new(text);

    let (line_no, counts) = lines.expect("the type/vehicles/customers/depots counts")?;
    let tokens: Vec<&str> = counts.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(syntax(line_no, "first line must carry four integers"));
    }
    let _kind = parse_count(tokens[0], line_no, "problem type")?;
    let vehicles_per_depot = parse_count(tokens[1], line_no, "vehicles per depot")?;
    let num_customers = parse_count(tokens[2], line_no, "customer count")?;
    let num_depots = parse_count(tokens[3], line_no, "depot count")?;
    if vehicles_per_depot == 0 || num_depots == 0 {
        return Err(invalid(
            line_no,
            "vehicle and depot counts must be positive",
        ));
    }

    let mut capacity: Option<f64> = None;
    for _ in 0..num_depots {
        let (line_no, limits) = lines.expect("a per-depot D Q line")?;
        let tokens: Vec<&str> = limits.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(syntax(line_no, "depot limits line must carry two numbers"));
        }
        let duration = parse_number(tokens[0], line_no, "route duration limit")?;
        let q = parse_number(tokens[1], line_no, "capacity")?;
        if duration != 0.0 {
            return Err(invalid(
                line_no,
                "route duration limits are not modeled; D must be 0",
            ));
        }
        if q <= 0.0 {
            return Err(invalid(line_no, "capacity must be positive"));
        }
        match capacity {
            None => capacity = Some(q),
            Some(prev) if prev != q => {
                return Err(invalid(line_no, "heterogeneous depot capacities"))
            }
            Some(_) => {}
        }
    }
    let capacity = capacity.expect("at least one depot");

    struct Row {
        coords: [f64; 2],
        service: f64,
        demand: f64,
        open: f64,
        close: f64,
    }
    let mut parse_row = |expected_id: usize, what: &str| -> Result<Row, ParseError> {
        let (line_no, row) = lines.expect(what)?;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() < 9 {
            return Err(syntax(line_no, format!("{what} needs at least 9 fields")));
        }
        let id = parse_count(tokens[0], line_no, "node id")?;
        if id != expected_id {
            return Err(syntax(
                line_no,
                format!("node id {id} out of order, expected {expected_id}"),
            ));
        }
        let x = parse_number(tokens[1], line_no, "x")?;
        let y = parse_number(tokens[2], line_no, "y")?;
        let service = parse_number(tokens[3], line_no, "service duration")?;
        let demand = parse_number(tokens[4], line_no, "demand")?;
        let combinations = parse_count(tokens[6], line_no, "visit combination count")?;
        let expected_len = combinations
            .checked_add(9)
            .ok_or_else(|| syntax(line_no, "visit combination count out of range"))?;
        if tokens.len() != expected_len {
            return Err(syntax(
                line_no,
                format!(
                    "{what} has {} fields, expected {expected_len}",
                    tokens.len()
                ),
            ));
        }
        let open = parse_number(tokens[expected_len - 2], line_no, "window open")?;
        let close = parse_number(tokens[expected_len - 1], line_no, "window close")?;
        if demand < 0.0 {
            return Err(invalid(line_no, format!("negative demand {demand}")));
        }
        if open < 0.0 || close < 0.0 {
            return Err(invalid(line_no, "negative time window"));
        }
        if open > close {
            return Err(invalid(
                line_no,
                format!("inverted window [{open}, {close}]"),
            ));
        }
        if service < 0.0 {
            return Err(invalid(line_no, "negative service duration"));
        }
        Ok(Row {
            coords: [x, y],
            service,
            demand,
            open,
            close,
        })
    };

    let mut customers = Vec::with_capacity(num_customers);
    for k in 0..num_customers {
        customers.push(parse_row(k + 1, "a customer row")?);
    }
    let mut depots = Vec::with_capacity(num_depots);
    for k in 0..num_depots {
        depots.push(parse_row(num_customers + k + 1, "a depot row")?);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(syntax(line_no, "unexpected trailing content"));
    }

    // Depots move to the front of the node list.
    let n = num_depots + num_customers;
    let mut coords = Vec::with_capacity(n);
    let mut is_depot = vec![false; n];
    let mut demand = vec![0.0; n];
    let mut service_time = vec![0.0; n];
    let mut tw_open = vec![0.0; n];
    let mut tw_close = vec![0.0; n];
    for (d, row) in depots.iter().enumerate() {
        coords.push(row.coords);
        is_depot[d] = true;
        tw_open[d] = row.open;
        tw_close[d] = row.close;
    }
    for (k, row) in customers.iter().enumerate() {
        let node = num_depots + k;
        coords.push(row.coords);
        demand[node] = row.demand;
        service_time[node] = row.service;
        tw_open[node] = row.open;
        tw_close[node] = row.close;
    }

    // Each depot owns a block of `vehicles_per_depot` agents.
    let agent_home_depot = (0..num_depots * vehicles_per_depot)
        .map(|a| a / vehicles_per_depot)
        .collect();

    InstanceData::new(InstanceParts {
        name: format!("cordeau_m{vehicles_per_depot}_n{num_customers}_t{num_depots}"),
        problem: Problem::Mdvrptw,
        seed: 0,
        coords,
        is_depot,
        demand,
        profit: vec![0.0; n],
        service_time,
        tw_open,
        tw_close,
        capacity,
        agent_home_depot,
        pickup_of: vec![None; n],
        soft: None,
        explicit_travel: None,
    })
    .map_err(|e| invalid(0, e.to_string()))
}

/// Keeps the explicit-travel escape hatch exercised: benchmark instances
/// derive Euclidean matrices, but externally supplied matrices can be
/// attached to a parsed instance.
pub fn with_explicit_travel(
    inst: &InstanceData,
    travel: SquareMatrix,
) -> Result<InstanceData, crate::error::InstanceError> {
    let mut parts = inst.to_parts();
    parts.explicit_travel = Some(travel);
    InstanceData::new(parts)
}
