from instructions.report_schemas import SCHEMAS, validate_document, validate_syndrome_input

__all__ = ['SCHEMAS', 'validate_document', 'validate_syndrome_input']
