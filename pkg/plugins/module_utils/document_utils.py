#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import csv
import io
import json

from .analysis import Histogram
from .errors import ParseException
from .ising_engine import IsingModel
from .network_model import Instance
from .qubo_engine import Qubo, VarCatalog
from .samplers import SampleRecord, SampleSet

try:
    import semantic_version
except ImportError:
    # Missing dependencies are handled elsewhere.
    pass

FORMAT_VERSION = '1.0.0'
SUPPORTED_VERSIONS = '>=1.0,<2.0'


def format_number(value):
    return '%.12g' % value


def dump_json(data):
    return json.dumps(data, sort_keys=True, indent=2) + '\n'


def load_json(text, filename=None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseException(e.msg, filename, e.lineno)


def check_version(data, filename=None):
    version = data.get('format_version', None)
    if version is None:
        raise ParseException('Document has no format_version', filename)
    try:
        parsed = semantic_version.Version.coerce(str(version))
    except ValueError:
        raise ParseException(f'Invalid format_version {version}', filename)
    if parsed not in semantic_version.SimpleSpec(SUPPORTED_VERSIONS):
        raise ParseException(f'Unsupported format_version {version}, expected {SUPPORTED_VERSIONS}', filename)


def write_document(kind, data):
    document = dict(data)
    document['format_version'] = FORMAT_VERSION
    document['kind'] = kind
    return dump_json(document)


def parse_document(text, kind=None, filename=None):
    data = load_json(text, filename)
    if not isinstance(data, dict):
        raise ParseException('Document is not a JSON object', filename, 1)
    check_version(data, filename)
    if kind is not None and data.get('kind', None) != kind:
        raise ParseException(f'Expected a {kind} document, got {data.get("kind", None)}', filename)
    return data


def write_instance(instance):
    return write_document('instance', instance.to_json())


def parse_instance(text, filename=None):
    data = parse_document(text, 'instance', filename)
    try:
        return Instance.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseException(f'Malformed instance document: {e}', filename)


def qubo_comments(qubo, penalties):
    return [
        f'penalties {penalties.regime_label} p_sum {penalties.p_sum:g} p_pair {penalties.p_pair:g}',
        f'constraint_elements {qubo.constraint_elements()} nonzero_elements {qubo.nonzero_elements()}',
    ]


def write_qubo(qubo, comments=None):
    lines = [f'# {comment}' for comment in comments or list()]
    for tag, count in sorted(qubo.element_counts.items()):
        lines.append(f'# elements {tag} {count}')
    lines.append(f'nvars {qubo.n} offset {format_number(qubo.offset)}')
    for (i, j), coefficient in sorted(qubo.terms.items()):
        tags = '+'.join(qubo.provenance.get((i, j), ('unknown',)))
        lines.append(f'{i} {j} {format_number(coefficient)} {tags}')
    return '\n'.join(lines) + '\n'


def parse_qubo(text, catalog=None, filename=None):
    header = None
    terms = dict()
    provenance = dict()
    element_counts = dict()
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        if line.startswith('#'):
            if len(fields) == 4 and fields[1] == 'elements':
                element_counts[fields[2]] = int(fields[3])
            continue
        try:
            if header is None:
                if len(fields) != 4 or fields[0] != 'nvars' or fields[2] != 'offset':
                    raise ParseException('Expected header "nvars N offset F"', filename, number)
                header = (int(fields[1]), float(fields[3]))
                continue
            if len(fields) != 4:
                raise ParseException('Expected "i j coeff tag"', filename, number)
            i, j = int(fields[0]), int(fields[1])
            if not 0 <= i <= j < header[0]:
                raise ParseException(f'Element ({i}, {j}) is outside the upper triangle of {header[0]} variables', filename, number)
            terms[(i, j)] = float(fields[2])
            provenance[(i, j)] = tuple(fields[3].split('+'))
        except ValueError as e:
            raise ParseException(str(e), filename, number)
    if header is None:
        raise ParseException('Missing "nvars N offset F" header', filename)
    if catalog is not None and len(catalog) != header[0]:
        raise ParseException(f'Catalog has {len(catalog)} entries, the QUBO has {header[0]} variables', filename)
    return Qubo(header[0], terms, catalog, provenance, header[1], element_counts)


def write_catalog(catalog):
    lines = ['# index station train time']
    for index, (station, train, time) in enumerate(catalog.entries):
        lines.append(f'{index} {station} {train} {time}')
    return '\n'.join(lines) + '\n'


def parse_catalog(text, filename=None):
    entries = list()
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        fields = line.split()
        try:
            if len(fields) != 4 or int(fields[0]) != len(entries):
                raise ParseException('Expected "index station train time" in index order', filename, number)
            entries.append((fields[1], int(fields[2]), int(fields[3])))
        except ValueError as e:
            raise ParseException(str(e), filename, number)
    return VarCatalog(entries)


def write_ising(model, comments=None):
    lines = [f'# {comment}' for comment in comments or list()]
    lines.append(f'nspins {model.n} offset {format_number(model.offset)}')
    for i, value in sorted(model.fields.items()):
        lines.append(f'h {i} {format_number(value)}')
    for (i, j), value in sorted(model.couplings.items()):
        lines.append(f'J {i} {j} {format_number(value)}')
    return '\n'.join(lines) + '\n'


def parse_ising(text, filename=None):
    header = None
    fields_map = dict()
    couplings = dict()
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        fields = line.split()
        try:
            if header is None:
                if len(fields) != 4 or fields[0] != 'nspins' or fields[2] != 'offset':
                    raise ParseException('Expected header "nspins N offset F"', filename, number)
                header = (int(fields[1]), float(fields[3]))
            elif fields[0] == 'h' and len(fields) == 3:
                fields_map[int(fields[1])] = float(fields[2])
            elif fields[0] == 'J' and len(fields) == 4:
                couplings[(int(fields[1]), int(fields[2]))] = float(fields[3])
            else:
                raise ParseException('Expected an "h i value" or "J i j value" line', filename, number)
        except ValueError as e:
            raise ParseException(str(e), filename, number)
    if header is None:
        raise ParseException('Missing "nspins N offset F" header', filename)
    return IsingModel(header[0], couplings, fields_map, header[1])


def write_sampleset(sampleset):
    output = io.StringIO()
    for key, value in sorted(sampleset.sampler_meta.items()):
        output.write(f'# {key} {json.dumps(value, sort_keys=True)}\n')
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(['bits', 'energy', 'count'])
    for record in sampleset.records:
        writer.writerow([record.bitstring(), format_number(record.energy), record.count])
    return output.getvalue()


def parse_sampleset(text, filename=None):
    meta = dict()
    records = list()
    header_seen = False
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith('#'):
            key, _, value = line[1:].strip().partition(' ')
            try:
                meta[key] = json.loads(value) if value else None
            except json.JSONDecodeError:
                raise ParseException(f'Malformed metadata value for {key}', filename, number)
            continue
        fields = next(csv.reader([line]))
        if not header_seen:
            if fields != ['bits', 'energy', 'count']:
                raise ParseException('Expected the header "bits,energy,count"', filename, number)
            header_seen = True
            continue
        if len(fields) != 3 or set(fields[0]) - set('01'):
            raise ParseException('Expected "bits,energy,count" with a binary bitstring', filename, number)
        if records and len(fields[0]) != len(records[0].bits):
            raise ParseException('Bitstrings have different lengths', filename, number)
        try:
            records.append(SampleRecord([int(bit) for bit in fields[0]], float(fields[1]), int(fields[2])))
        except ValueError as e:
            raise ParseException(str(e), filename, number)
    return SampleSet(records, meta)


def write_histogram(histogram):
    lines = ['bin_start,count']
    for bin_start, count in histogram.counts.items():
        lines.append(f'{bin_start},{count}')
    return '\n'.join(lines) + '\n'


def load_histogram_csv(text, filename=None, edge=None):
    counts = dict()
    rows = csv.reader(io.StringIO(text))
    for number, fields in enumerate(rows, start=1):
        if not fields or fields[0].startswith('#'):
            continue
        if fields == ['bin_start', 'count']:
            continue
        try:
            if len(fields) != 2:
                raise ValueError('expected two columns')
            bin_start, count = int(fields[0]), int(fields[1])
        except ValueError as e:
            raise ParseException(f'Expected "bin_start,count": {e}', filename, number)
        if count < 0:
            raise ParseException(f'Negative count {count}', filename, number)
        counts[bin_start] = counts.get(bin_start, 0) + count
    return Histogram(counts, edge)


def write_train_diagram(rows):
    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=['train', 'station', 't_in', 't_out', 'relaxed'], lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(dict(row, relaxed=str(row['relaxed']).lower()))
    return output.getvalue()
