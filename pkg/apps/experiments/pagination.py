"""
Pagination classes for the experiments app.
"""
from rest_framework.pagination import PageNumberPagination
from rest_framework.response import Response


class LabPageNumberPagination(PageNumberPagination):
    """
    Page-number pagination that also reports page totals.

    Query Parameters:
    - page: Page number (default: 1)
    - page_size: Items per page (default: 20, max: 200)
    """

    page_size = 20
    page_size_query_param = 'page_size'
    max_page_size = 200

    def get_paginated_response(self, data):
        return Response({
            'count': self.page.paginator.count,
            'next': self.get_next_link(),
            'previous': self.get_previous_link(),
            'total_pages': self.page.paginator.num_pages,
            'current_page': self.page.number,
            'page_size': self.page.paginator.per_page,
            'results': data
        })


class RunPagination(LabPageNumberPagination):
    page_size = 20
    max_page_size = 50


class EvaluationRowPagination(LabPageNumberPagination):
    # reports run to thousands of rows
    page_size = 100
    max_page_size = 1000
